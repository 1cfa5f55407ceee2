"""Diagnostic for the sample fixture: per-node membership margins.

Run after editing make_sample.py to see which rounds sit too close to the
membership threshold under the offline stack.
"""

from __future__ import annotations

from convomap.embedding import OfflineEmbeddingProvider, cosine
from convomap.ingest import pair_messages, parse_export
from convomap.model import Conversation
from convomap.topics import OfflineLlmProvider, TopicConfig, build_topic_model

from make_sample import OUT


def main() -> None:
    raw = parse_export(OUT.read_bytes())
    conv = Conversation(id="c1", title=raw.title, nodes=pair_messages(raw))
    build_topic_model(conv, OfflineLlmProvider(), OfflineEmbeddingProvider(), TopicConfig())

    level0 = conv.level0_topics()
    print(f"{len(level0)} topics:")
    for t in level0:
        print(f"  {t.id} {t.label!r}: {len(t.member_similarities)} members")
    print(f"subtopics: {[(t.id, t.parent, len(t.member_similarities)) for t in conv.topics if t.level == 1]}")

    multi = [n for n in conv.nodes if len(n.memberships) >= 2]
    print(f"\nnodes with >=2 memberships: {len(multi)} -> {[n.seq_index for n in multi]}")

    print("\nper-node top-2 similarities (* = member):")
    for n in conv.nodes:
        sims = sorted(((cosine(n.embedding, t.embedding), t.id) for t in level0), reverse=True)
        member_ids = {t for t, _ in n.memberships}
        cells = " ".join(
            f"{tid}{'*' if tid in member_ids else ' '}{s:6.3f}" for s, tid in sims[:3]
        )
        print(f"  {n.seq_index:2d} {cells}")


if __name__ == "__main__":
    main()
