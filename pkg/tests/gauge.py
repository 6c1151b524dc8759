"""Change of intertwiner bases on pointed instances, for naturality tests."""

from ioalg.examples import copy_instance


def rescale(inst, c, omega=True):
    """Y_(a1,a2) -> c[(a1,a2)] Y_(a1,a2), with F (and, if ``omega``, Omega) transformed to match."""
    out = copy_instance(inst)
    one = out.one()

    def s(a1, a2):
        return one * c[(a1, a2)] if (a1, a2) in c else one

    for (a1, a2, a3), tabs in out.intertwiners.items():
        for t in tabs:
            for row in t.entries.values():
                for l3, vec in row.items():
                    row[l3] = tuple(v * s(a1, a2) for v in vec)
    for (a1, a2, a3, a4), blk in out.F.items():
        for r, (a5, _, _) in enumerate(blk.rows):
            for k, (a, _, _) in enumerate(blk.cols):
                cp = s(a1, a5) * s(a2, a3)
                ci = s(a1, a2) * s(a, a3)
                blk.matrix[r][k] = blk.matrix[r][k] * cp * ci.inverse()
    if omega:
        for (a1, a2, a3), m in out.Omega.items():
            m[0][0] = m[0][0] * s(a1, a2) * s(a2, a1).inverse()
    return out
