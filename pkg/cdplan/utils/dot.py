"""
DOT export of cd-trees: one subgraph per skeleton, dashed edges between twins
"""
from cdplan.models.cdtree import CdTree


def _quote(text: str) -> str:
    return '"' + str(text).replace('\\', '\\\\').replace('"', '\\"') + '"'


def _node_id(tree_node: str, vertex: str) -> str:
    return _quote(f"{tree_node}/{vertex}")


def cdtree_to_dot(ct: CdTree) -> str:
    lines = ["graph cdtree {", "\tcompound=true;", "\tnode [shape=circle, fontsize=10];", ""]

    for name in ct.preorder:
        node = ct.nodes[name]
        lines.append(f"\tsubgraph {_quote('cluster_' + name)} {{")
        lines.append(f"\t\tlabel={_quote(name)};")
        for x in node.skeleton.vertices:
            shape = ', shape=box' if node.is_virtual(x) else ''
            lines.append(f"\t\t{_node_id(name, x)} [label={_quote(x)}{shape}];")
        for e, (u, v) in node.skeleton.edges.items():
            lines.append(f"\t\t{_node_id(name, u)} -- {_node_id(name, v)} [label={_quote(e)}];")
        lines.append("\t}")
        lines.append("")

    for parent, child in ct.tree_edges():
        lines.append(f"\t{_node_id(parent, ct.child_vertex(parent, child))} -- "
                     f"{_node_id(child, ct.parent_vertex(child))} [style=dashed, color=gray];")

    lines.append("}")
    return "\n".join(lines) + "\n"
