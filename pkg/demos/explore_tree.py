"""Build an information tree from a synthetic web and grow it by hand.

Runs fully offline: the corpus is generated, the fetcher reads from it.
"""

from collections import Counter
import random

from agentarena.gateway import FixtureWeb, fixture_labeler, make_synthetic_corpus
from agentarena.infotree import build_tree, expand_depth, expand_width, random_start


def main() -> None:
    topic = "field recorders"
    web = FixtureWeb(make_synthetic_corpus(topic, seed=7))
    labeler = fixture_labeler(web)
    tree = build_tree(topic, web, web, budget=18, labeler=labeler)

    depths = Counter(node.depth for node in tree.nodes.values())
    print(f"built {len(tree.nodes)} nodes, max depth {tree.max_depth()}")
    for depth in sorted(depths):
        print(f"  depth {depth}: {depths[depth]} nodes")

    rng = random.Random(5)
    path = random_start(tree, rng)
    print("\nrandom starting path:")
    for node_id in path.node_ids:
        node = tree.nodes[node_id]
        print(f"  {'  ' * node.depth}{node.title}  ({node.url})")

    focal = path.focal
    added_wide = expand_width(tree, focal, 6, web, labeler=labeler)
    added_deep = expand_depth(tree, focal, web, fan_out=3, labeler=labeler)
    print(f"\nexpanded the focal node: +{added_wide} siblings, "
          f"+{added_deep} children, tree now {len(tree.nodes)} nodes")
    for child_id in tree.children(focal):
        print(f"  child: {tree.nodes[child_id].title}")


if __name__ == "__main__":
    main()
