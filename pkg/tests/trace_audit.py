"""Independent checks of a traced dissemination against the protocol rules."""

from collections import defaultdict


def audit(graph, table, ttl, outcome):
    trace = outcome.trace
    assert trace and trace[0].kind == "origin" and trace[0].hop == 0
    origin = trace[0].receiver

    # first delivery of each node is the one that is processed
    first = {}
    for d in trace:
        if d.receiver not in first:
            first[d.receiver] = d
    processed = list(outcome.processed)
    assert len(processed) == len(set(processed)), "a node processed the query twice"
    assert set(processed) == set(first), "processed set differs from delivered set"
    assert outcome.reached == len(processed)
    hop_of = {n: first[n].hop for n in processed}
    sender_of = {n: first[n].sender for n in processed}

    # hop-synchronous, FIFO processing order
    hops = [hop_of[n] for n in processed]
    assert hops == sorted(hops)

    deliveries_from = defaultdict(list)
    for d in trace[1:]:
        assert d.receiver in graph.neighbors(d.sender), "message over a non-existent edge"
        assert d.sender in hop_of, "message from a node that never processed the query"
        assert d.hop == hop_of[d.sender] + 1, "TTL did not decrease by one per hop"
        assert ttl - d.hop >= 0, "message with negative TTL"
        assert d.receiver != sender_of[d.sender], "message sent back to the sender"
        deliveries_from[d.sender].append(d)
    assert outcome.messages == len(trace) - 1

    for n in processed:
        sent = deliveries_from[n]
        if hop_of[n] >= ttl:
            assert not sent, "forwarding after TTL expiry"
            continue
        relays = {int(r) for r in table.relays(n)} - {sender_of[n]}
        relay_sent = [d.receiver for d in sent if d.kind == "relay"]
        assert sorted(relay_sent) == sorted(relays), "relay set mismatch"
        assert len(relay_sent) == len(set(relay_sent)), "duplicate relay message"
        for d in sent:
            if d.kind == "gossip":
                assert d.receiver not in relays
        # relay self-routing: every indexed holder in reach of the TTL is processed
        for holder, (nxt, dist) in table.entries(n).items():
            assert nxt in graph.neighbors(n)
            if nxt != holder:
                assert holder in table.entries(nxt) and table.entries(nxt)[holder][1] == dist - 1
            if hop_of[n] + dist <= ttl:
                assert holder in hop_of, f"relay target {holder} of node {n} never processed"

    answered = {n for n in processed if graph.holders[n]}
    assert outcome.answered_nodes == answered
    assert outcome.hits == len(answered) <= graph.holder_count
    assert origin in hop_of and hop_of[origin] == 0
    if outcome.reached > 1:
        assert outcome.messages >= outcome.reached - 1
