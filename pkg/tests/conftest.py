import numpy as np

from nbldpc.channel import ChannelOutput
from nbldpc.codes import ParityCheckCode
from nbldpc.field import random_gl
from nbldpc.subspace import random_element, uniform_random_subspace


def random_tree_instance(rng, *, max_vars=8, max_m=3, qs=(2, 3), max_assignments=1 << 14):
    """Random cycle-free code, a random codeword and its channel outputs.

    The Tanner graph grows as a tree: every new check joins one existing
    variable to one or more fresh ones. Noise dimensions are drawn per symbol
    and the instance is redrawn until exhaustive enumeration stays small.
    """
    while True:
        q = int(rng.choice(qs))
        m = int(rng.integers(1, max_m + 1))
        n = int(rng.integers(2, max_vars + 1))
        rows, word = [], [rng.integers(0, q, size=m)]
        while len(word) < n:
            anchor = int(rng.integers(len(word)))
            fresh = list(range(len(word), min(n, len(word) + int(rng.integers(1, 4)))))
            coeffs = {j: random_gl(m, q, rng) for j in [anchor] + fresh}
            acc = coeffs[anchor].data @ word[anchor]
            for j in fresh[:-1]:
                word.append(rng.integers(0, q, size=m))
                acc = acc + coeffs[j].data @ word[j]
            last = coeffs[fresh[-1]].inverse.data @ (-acc)
            word.append(last % q)
            rows.append(tuple(sorted(coeffs.items())))
        code = ParityCheckCode(q, m, len(rows), n, tuple(rows))
        dims = rng.integers(0, m + 1, size=n)
        if q ** int(dims.sum()) > max_assignments:
            continue
        outputs = []
        for x, d in zip(word, dims):
            v = uniform_random_subspace(m, int(d), q, rng)
            outputs.append(ChannelOutput((x + random_element(v, rng)) % q, v))
        assert code.is_codeword(word)
        return code, [np.asarray(x) for x in word], outputs


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
