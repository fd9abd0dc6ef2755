"""Pure-Python fallback for the exhaustive deterministic sweep."""
import numpy as np


def sweep_abelian(trans, deltas, initial, terminal, max_len):
    trans = np.asarray(trans).tolist()
    deltas = [[tuple(v) for v in row] for row in np.asarray(deltas).tolist()]
    terminal = [bool(t) for t in np.asarray(terminal).tolist()]
    n_letters = len(trans[0]) if trans else 0
    dim = len(deltas[0][0]) if deltas and deltas[0] else 0
    offsets = []
    total = 0
    for k in range(max_len + 1):
        offsets.append(total)
        total += n_letters**k
    out = bytearray(total)
    zero = (0,) * dim
    out[0] = terminal[initial]

    def visit(state, reg, depth, num):
        if depth == max_len:
            return
        row = trans[state]
        drow = deltas[state]
        base = offsets[depth + 1]
        for x in range(n_letters):
            t = row[x]
            if t < 0:
                continue
            nreg = tuple(a + b for a, b in zip(reg, drow[x]))
            idx = num * n_letters + x
            if terminal[t] and nreg == zero:
                out[base + idx] = 1
            visit(t, nreg, depth + 1, idx)

    visit(initial, zero, 0, 0)
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()
