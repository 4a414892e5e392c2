"""Pure-Python grouping kernel (fallback for the compiled extension).

Single-pass stream grouping over interned template ids. State is bounded by
the number of distinct templates: per template we track the open
repeated-similar chain and the most recent group rooted at that template
(for rule-based cascade merging).
"""

from __future__ import annotations

import numpy as np

JOIN_NEW = 0
JOIN_SIMILAR = 1
JOIN_RULE = 2


class Grouper:
    """Incremental grouper; ``process`` may be called chunk by chunk.

    rule_indptr/rule_ants/rule_dts form a CSR structure keyed by consequent
    template id (rows only for ids < len(rule_indptr) - 1), listing candidate
    antecedent template ids and the per-rule maximum gap in ms.
    """

    def __init__(self, rule_indptr, rule_ants, rule_dts, window_ms: float, eps: float):
        self.rule_indptr = [int(v) for v in rule_indptr]
        self.rule_ants = [int(v) for v in rule_ants]
        self.rule_dts = [float(v) for v in rule_dts]
        self.n_rule_templates = len(self.rule_indptr) - 1
        self.window_ms = float(window_ms)
        self.eps_sq = float(eps) * float(eps)
        self.n_groups = 0
        # per template: open similar-chain [group, last_ts, last_emb]
        self._chain: dict[int, list] = {}
        # per template: latest group rooted here [group, root_ts]
        self._root: dict[int, list] = {}

    def process(self, template_ids, ts, emb=None):
        """Assign each event a group id; returns (group_ids, join_codes)."""
        tids = np.asarray(template_ids, dtype=np.int64)
        times = np.asarray(ts, dtype=np.float64)
        n = len(tids)
        out = np.empty(n, dtype=np.int64)
        codes = np.empty(n, dtype=np.int8)
        window = self.window_ms
        eps_sq = self.eps_sq
        chain = self._chain
        root = self._root
        for i in range(n):
            tid = int(tids[i])
            t = float(times[i])
            row = emb[i] if emb is not None else None
            entry = chain.get(tid)
            if entry is not None and t - entry[1] <= window:
                ok = True
                if row is not None:
                    last = entry[2]
                    acc = 0.0
                    for a, b in zip(row, last):
                        d = a - b
                        acc += d * d
                        if acc >= eps_sq:
                            ok = False
                            break
                if ok:
                    out[i] = entry[0]
                    codes[i] = JOIN_SIMILAR
                    entry[1] = t
                    entry[2] = row
                    continue
            best_group = -1
            best_ts = -1.0
            if tid < self.n_rule_templates:
                for k in range(self.rule_indptr[tid], self.rule_indptr[tid + 1]):
                    r = root.get(self.rule_ants[k])
                    if r is not None and t - r[1] <= self.rule_dts[k] and r[1] > best_ts:
                        best_ts = r[1]
                        best_group = r[0]
            if best_group >= 0:
                out[i] = best_group
                codes[i] = JOIN_RULE
                chain[tid] = [best_group, t, row]
                continue
            gid = self.n_groups
            self.n_groups += 1
            out[i] = gid
            codes[i] = JOIN_NEW
            chain[tid] = [gid, t, row]
            root[tid] = [gid, t]
        return out, codes
