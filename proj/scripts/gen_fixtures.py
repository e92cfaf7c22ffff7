#!/usr/bin/env python3
"""Generates the bundled fixtures.

Writes circuit-level detector error models for rotated surface codes under an
SI1000-style noise model (N-Z CNOT schedule, memory-Z experiment), plus CSS
code spec JSON files for the repetition, Steane and [[72,12,6]] bivariate
bicycle codes.

The DEM extraction enumerates every single circuit fault, propagates its
Pauli frame through the rest of the circuit, and records which detectors and
logical observables flip. Faults with identical stamps are merged with
XOR-combined probabilities.
"""

import json
import os
import sys
from collections import defaultdict

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


# ----------------------------------------------------------------------------
# rotated surface code layout
# ----------------------------------------------------------------------------

def surface_layout(d):
    data = {(r, c) for r in range(d) for c in range(d)}
    z_plaq, x_plaq = {}, {}
    for r in range(d + 1):
        for c in range(d + 1):
            support = [q for q in ((r - 1, c - 1), (r - 1, c), (r, c - 1), (r, c))
                       if q in data]
            if not support:
                continue
            if (r + c) % 2 == 0:
                if r in (0, d):
                    continue
                z_plaq[(r, c)] = support
            else:
                if c in (0, d):
                    continue
                x_plaq[(r, c)] = support
    assert len(z_plaq) == (d * d - 1) // 2, (d, len(z_plaq))
    assert len(x_plaq) == (d * d - 1) // 2
    logical_z = [(0, c) for c in range(d)]  # top data row
    # commutation checks
    for plist in (z_plaq, x_plaq):
        for a, sa in z_plaq.items():
            for b, sb in x_plaq.items():
                assert len(set(sa) & set(sb)) % 2 == 0
    for b, sb in x_plaq.items():
        assert len(set(logical_z) & set(sb)) % 2 == 0
    return data, z_plaq, x_plaq, logical_z


def corner(plaq, name):
    r, c = plaq
    return {"NW": (r - 1, c - 1), "NE": (r - 1, c), "SW": (r, c - 1), "SE": (r, c)}[name]


Z_ORDER = ["NW", "SW", "NE", "SE"]
X_ORDER = ["NW", "NE", "SW", "SE"]


def build_circuit(d, rounds, p):
    """Returns (ops, detectors, observable_keys, coords).

    ops: time-ordered list of gate and noise operations.
    detectors: list of (coords, [measurement keys]) whose XOR is the detector.
    observable_keys: measurement keys whose XOR is the logical observable.
    """
    data, z_plaq, x_plaq, logical_z = surface_layout(d)
    ancillas = [("a",) + a for a in sorted(z_plaq) + sorted(x_plaq)]
    ops = []

    def dq(q):
        return ("d",) + q

    def aq(a):
        return ("a",) + a

    def dep1(q):
        ops.append(("DEP1", q, p / 10))

    def dep2(a, b):
        ops.append(("DEP2", a, b, p))

    def xerr(q, prob):
        ops.append(("XERR", q, prob))

    # initial resets
    for q in sorted(data):
        ops.append(("R", dq(q)))
        xerr(dq(q), 2 * p)

    for t in range(rounds):
        for q in sorted(data):
            dep1(dq(q))  # data idle during the previous measure/reset window
        for a in ancillas:
            ops.append(("R", a))
            xerr(a, 2 * p)
        for a in sorted(x_plaq):
            ops.append(("H", aq(a)))
            dep1(aq(a))
        for step in range(4):
            used = set()
            for a in sorted(z_plaq):
                q = corner(a, Z_ORDER[step])
                if q in data:
                    assert dq(q) not in used and aq(a) not in used
                    used.update((dq(q), aq(a)))
                    ops.append(("CNOT", dq(q), aq(a)))  # data controls, ancilla collects
                    dep2(dq(q), aq(a))
            for a in sorted(x_plaq):
                q = corner(a, X_ORDER[step])
                if q in data:
                    assert dq(q) not in used and aq(a) not in used
                    used.update((dq(q), aq(a)))
                    ops.append(("CNOT", aq(a), dq(q)))  # ancilla controls
                    dep2(aq(a), dq(q))
        for a in sorted(x_plaq):
            ops.append(("H", aq(a)))
            dep1(aq(a))
        for a in ancillas:
            xerr(a, 5 * p)
            ops.append(("M", a, (t, a[1:])))

    for q in sorted(data):
        xerr(dq(q), 5 * p)
        ops.append(("M", dq(q), ("final", q)))

    anc_coords = sorted(z_plaq) + sorted(x_plaq)
    detectors = []
    for a in sorted(z_plaq):
        detectors.append(((a[1], a[0], 0), [(0, a)]))
    for t in range(1, rounds):
        for a in anc_coords:
            detectors.append(((a[1], a[0], t), [(t, a), (t - 1, a)]))
    for a in sorted(z_plaq):
        keys = [("final", q) for q in z_plaq[a]] + [(rounds - 1, a)]
        detectors.append(((a[1], a[0], rounds), keys))
    observable_keys = [("final", q) for q in logical_z]
    return ops, detectors, observable_keys


# ----------------------------------------------------------------------------
# single-fault enumeration via Pauli frame propagation
# ----------------------------------------------------------------------------

def propagate(ops, start, frame):
    """Propagates a Pauli frame {qubit: (x, z)} from ops[start:]; returns the
    set of flipped measurement keys."""
    flipped = set()
    for op in ops[start:]:
        kind = op[0]
        if kind == "CNOT":
            _, ctrl, tgt = op
            fc = frame.get(ctrl, (0, 0))
            ft = frame.get(tgt, (0, 0))
            nt = (ft[0] ^ fc[0], ft[1])
            nc = (fc[0], fc[1] ^ ft[1])
            frame[tgt] = nt
            frame[ctrl] = nc
        elif kind == "H":
            q = op[1]
            x, z = frame.get(q, (0, 0))
            frame[q] = (z, x)
        elif kind == "R":
            frame.pop(op[1], None)
        elif kind == "M":
            q, key = op[1], op[2]
            if frame.get(q, (0, 0))[0]:
                flipped.add(key)
    return flipped


PAULIS1 = [(1, 0), (0, 1), (1, 1)]  # X, Z, Y


def enumerate_faults(ops):
    """Yields (probability, {qubit: pauli}, op_index_after_fault)."""
    for idx, op in enumerate(ops):
        kind = op[0]
        if kind == "DEP1":
            _, q, p = op
            for pauli in PAULIS1:
                yield p / 3, {q: pauli}, idx + 1
        elif kind == "DEP2":
            _, a, b, p = op
            for pa in [(0, 0)] + PAULIS1:
                for pb in [(0, 0)] + PAULIS1:
                    if pa == (0, 0) and pb == (0, 0):
                        continue
                    fr = {}
                    if pa != (0, 0):
                        fr[a] = pa
                    if pb != (0, 0):
                        fr[b] = pb
                    yield p / 15, fr, idx + 1
        elif kind == "XERR":
            _, q, p = op
            yield p, {q: (1, 0)}, idx + 1


def xor_p(a, b):
    return a * (1 - b) + b * (1 - a)


def build_dem(d, rounds, p):
    ops, detectors, observable_keys = build_circuit(d, rounds, p)
    key_to_det = defaultdict(list)
    for i, (coords, keys) in enumerate(detectors):
        for k in keys:
            key_to_det[k].append(i)
    obs_keys = set(observable_keys)

    # Each fault is split into its X and Z Pauli components, which land on
    # disjoint detector sublattices; with a distance-preserving schedule every
    # component stamp is graphlike (at most two detectors). The components are
    # treated as independent mechanisms, which is the standard matching-graph
    # approximation of depolarizing noise.
    merged = {}
    for prob, frame, start in enumerate_faults(ops):
        x_part = {q: (1, 0) for q, (x, z) in frame.items() if x}
        z_part = {q: (0, 1) for q, (x, z) in frame.items() if z}
        for part in (x_part, z_part):
            if not part:
                continue
            flipped = propagate(ops, start, dict(part))
            dets = set()
            for k in flipped:
                for i in key_to_det[k]:
                    dets.symmetric_difference_update({i})
            obs = len(flipped & obs_keys) % 2
            dets = frozenset(dets)
            obs_set = frozenset([0] if obs else [])
            if not dets and not obs_set:
                continue
            assert dets, f"undetectable fault at op {start - 1}: {ops[start - 1]}"
            assert len(dets) <= 2, f"non-graphlike component at op {start - 1}"
            key = (dets, obs_set)
            merged[key] = xor_p(merged.get(key, 0.0), prob)

    lines = []
    lines.append("# rotated surface code, memory Z, N-Z schedule")
    lines.append(f"# d={d} rounds={rounds} si1000-style p={p}")
    lines.append(f"# num_detectors: {len(detectors)}")
    lines.append("# num_observables: 1")
    lines.append(f"# num_mechanisms: {len(merged)}")
    for i, (coords, _) in enumerate(detectors):
        cs = ", ".join(f"{v:g}" for v in coords)
        lines.append(f"detector({cs}) D{i}")
    def sort_key(item):
        (dets, obs), _ = item
        return (sorted(dets), sorted(obs))
    for (dets, obs), prob in sorted(merged.items(), key=sort_key):
        targets = " ".join(f"D{i}" for i in sorted(dets))
        if obs:
            targets += " " + " ".join(f"L{i}" for i in sorted(obs))
        lines.append(f"error({prob:.17g}) {targets}")
    return "\n".join(lines) + "\n", len(detectors), len(merged)


# ----------------------------------------------------------------------------
# CSS code specs
# ----------------------------------------------------------------------------

def gf2_rank(rows, n):
    rows = [int("".join(str(b) for b in r), 2) if isinstance(r, list) else r for r in rows]
    rank = 0
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            rank += 1
    return rank


def row_to_int(row):
    v = 0
    for i, b in enumerate(row):
        if b:
            v |= 1 << i
    return v


def int_to_row(v, n):
    return [(v >> i) & 1 for i in range(n)]


def gf2_reduce(v, basis):
    for b in basis:
        v = min(v, v ^ b)
    return v


def gf2_basis(vectors):
    basis = []
    for v in vectors:
        v = gf2_reduce(v, basis)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def kernel_basis(rows, n):
    """Basis of the null space of the matrix given by integer rows."""
    m = len(rows)
    aug = [(rows[i], 1 << i) for i in range(m)]
    # column-reduce: we solve H x = 0 by Gaussian elimination on columns of H^T
    mat = []
    for col in range(n):
        vec = 0
        for i, r in enumerate(rows):
            if (r >> col) & 1:
                vec |= 1 << i
        mat.append((vec, 1 << col))
    basis = []
    kernel = []
    for vec, tag in mat:
        for bv, bt in basis:
            if vec > (vec ^ bv):
                vec ^= bv
                tag ^= bt
        if vec:
            basis.append((vec, tag))
            basis.sort(key=lambda t: -t[0])
        else:
            kernel.append(tag)
    return kernel


def css_logicals(hx_rows, hz_rows, n):
    """Z logicals: ker(hx) modulo rowspace(hz); X logicals symmetric."""
    def pick(h_keep, h_mod):
        kern = kernel_basis(h_keep, n)
        span = gf2_basis([r for r in h_mod])
        logicals = []
        basis = list(span)
        for v in kern:
            red = gf2_reduce(v, basis)
            if red:
                basis.append(red)
                basis.sort(reverse=True)
                logicals.append(v)
        return logicals

    lz = pick(hx_rows, hz_rows)
    lx = pick(hz_rows, hx_rows)
    return lx, lz


def bb72_spec():
    l, m = 6, 6
    n = 2 * l * m

    def perm(s, t):
        rows = []
        for a in range(l):
            for b in range(m):
                row = [0] * (l * m)
                row[((a + s) % l) * m + (b + t) % m] = 1
                rows.append(row)
        return rows

    def madd(*ms):
        out = [[0] * len(ms[0][0]) for _ in ms[0]]
        for mat in ms:
            for i, row in enumerate(mat):
                for j, v in enumerate(row):
                    out[i][j] ^= v
        return out

    A = madd(perm(3, 0), perm(0, 1), perm(0, 2))  # x^3 + y + y^2
    B = madd(perm(0, 3), perm(1, 0), perm(2, 0))  # y^3 + x + x^2
    hx = [ra + rb for ra, rb in zip(A, B)]
    Bt = [list(col) for col in zip(*B)]
    At = [list(col) for col in zip(*A)]
    hz = [rb + ra for rb, ra in zip(Bt, At)]
    for rx in hx:
        for rz in hz:
            assert sum(a & b for a, b in zip(rx, rz)) % 2 == 0
    hx_int = [row_to_int(r) for r in hx]
    hz_int = [row_to_int(r) for r in hz]
    k = n - gf2_rank(list(hx_int), n) - gf2_rank(list(hz_int), n)
    assert k == 12, k
    lx, lz = css_logicals(hx_int, hz_int, n)
    assert len(lx) == 12 and len(lz) == 12
    return {
        "name": "bb72",
        "n": n,
        "hx": hx,
        "hz": hz,
        "lx": [int_to_row(v, n) for v in lx],
        "lz": [int_to_row(v, n) for v in lz],
    }


def main():
    os.makedirs(OUT, exist_ok=True)

    for d, rounds in ((3, 3), (5, 5)):
        text, ndet, nmech = build_dem(d, rounds, 0.001)
        path = os.path.join(OUT, f"surface_d{d}_nz_si1000_p0.001.dem")
        with open(path, "w") as f:
            f.write(text)
        print(f"{path}: {ndet} detectors, {nmech} mechanisms")

    specs = {
        "rep3.json": {
            "name": "rep3",
            "n": 3,
            "hx": [],
            "hz": [[1, 1, 0], [0, 1, 1]],
            "lx": [],
            "lz": [[1, 0, 0]],
        },
        "steane.json": {
            "name": "steane",
            "n": 7,
            "hx": [[0, 0, 0, 1, 1, 1, 1], [0, 1, 1, 0, 0, 1, 1], [1, 0, 1, 0, 1, 0, 1]],
            "hz": [[0, 0, 0, 1, 1, 1, 1], [0, 1, 1, 0, 0, 1, 1], [1, 0, 1, 0, 1, 0, 1]],
            "lx": [[1, 1, 1, 0, 0, 0, 0]],
            "lz": [[1, 1, 1, 0, 0, 0, 0]],
        },
        "bb72.json": bb72_spec(),
    }
    for name, spec in specs.items():
        path = os.path.join(OUT, name)
        with open(path, "w") as f:
            json.dump(spec, f)
            f.write("\n")
        print(f"{path}: n={spec['n']}, checks={len(spec['hz'])}")


if __name__ == "__main__":
    sys.exit(main())
