# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grouping kernel: single-pass stream grouping over template ids.

Mirrors aegisim.kernels.pure.Grouper exactly; the test suite asserts both
kernels produce identical group assignments.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

JOIN_NEW = 0
JOIN_SIMILAR = 1
JOIN_RULE = 2

DEF INITIAL_CAPACITY = 1024


cdef class Grouper:
    cdef cnp.int64_t[::1] rule_indptr
    cdef cnp.int64_t[::1] rule_ants
    cdef double[::1] rule_dts
    cdef double window_ms
    cdef double eps_sq
    cdef public long n_groups
    cdef long n_rule_templates

    # per-template state, grown on demand
    cdef long capacity
    cdef long emb_dim
    cdef cnp.int64_t* chain_group
    cdef double* chain_ts
    cdef double* chain_emb
    cdef cnp.int64_t* root_group
    cdef double* root_ts

    def __cinit__(self, rule_indptr, rule_ants, rule_dts, double window_ms, double eps):
        self.rule_indptr = np.ascontiguousarray(rule_indptr, dtype=np.int64)
        self.rule_ants = np.ascontiguousarray(rule_ants, dtype=np.int64)
        self.rule_dts = np.ascontiguousarray(rule_dts, dtype=np.float64)
        self.n_rule_templates = self.rule_indptr.shape[0] - 1
        self.window_ms = window_ms
        self.eps_sq = eps * eps
        self.n_groups = 0
        self.capacity = 0
        self.emb_dim = -1
        self.chain_group = NULL
        self.chain_ts = NULL
        self.chain_emb = NULL
        self.root_group = NULL
        self.root_ts = NULL

    def __dealloc__(self):
        if self.chain_group != NULL:
            free(self.chain_group)
            free(self.chain_ts)
            free(self.root_group)
            free(self.root_ts)
        if self.chain_emb != NULL:
            free(self.chain_emb)

    cdef void _grow(self, long needed):
        cdef long new_cap = self.capacity if self.capacity > 0 else INITIAL_CAPACITY
        while new_cap <= needed:
            new_cap *= 2
        cdef cnp.int64_t* cg = <cnp.int64_t*>malloc(new_cap * sizeof(cnp.int64_t))
        cdef double* ct = <double*>malloc(new_cap * sizeof(double))
        cdef cnp.int64_t* rg = <cnp.int64_t*>malloc(new_cap * sizeof(cnp.int64_t))
        cdef double* rt = <double*>malloc(new_cap * sizeof(double))
        cdef double* ce = NULL
        cdef long i
        if self.emb_dim > 0:
            ce = <double*>malloc(new_cap * self.emb_dim * sizeof(double))
            for i in range(new_cap * self.emb_dim):
                ce[i] = 0.0
        for i in range(new_cap):
            cg[i] = -1
            rg[i] = -1
            ct[i] = 0.0
            rt[i] = 0.0
        if self.capacity > 0:
            for i in range(self.capacity):
                cg[i] = self.chain_group[i]
                ct[i] = self.chain_ts[i]
                rg[i] = self.root_group[i]
                rt[i] = self.root_ts[i]
            if ce != NULL and self.chain_emb != NULL:
                for i in range(self.capacity * self.emb_dim):
                    ce[i] = self.chain_emb[i]
            free(self.chain_group)
            free(self.chain_ts)
            free(self.root_group)
            free(self.root_ts)
            if self.chain_emb != NULL:
                free(self.chain_emb)
        self.chain_group = cg
        self.chain_ts = ct
        self.root_group = rg
        self.root_ts = rt
        self.chain_emb = ce
        self.capacity = new_cap

    def process(self, template_ids, ts, emb=None):
        """Assign each event a group id; returns (group_ids, join_codes)."""
        cdef cnp.int64_t[::1] tids = np.ascontiguousarray(template_ids, dtype=np.int64)
        cdef double[::1] times = np.ascontiguousarray(ts, dtype=np.float64)
        cdef double[:, ::1] rows
        cdef bint has_emb = emb is not None
        cdef long n = tids.shape[0]
        cdef long i, k, d, tid, gid, base
        cdef long best_group, ant
        cdef double t, best_ts, acc, diff
        cdef bint similar
        cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
        cdef cnp.ndarray[cnp.int8_t, ndim=1] codes = np.empty(n, dtype=np.int8)
        cdef long max_tid = -1

        if has_emb:
            rows = np.ascontiguousarray(emb, dtype=np.float64)
            if self.emb_dim == -1:
                self.emb_dim = rows.shape[1]
                if self.capacity > 0 and self.emb_dim > 0:
                    self.chain_emb = <double*>malloc(self.capacity * self.emb_dim * sizeof(double))
                    for i in range(self.capacity * self.emb_dim):
                        self.chain_emb[i] = 0.0
        else:
            rows = np.empty((0, 1), dtype=np.float64)
            if self.emb_dim == -1:
                self.emb_dim = 0

        for i in range(n):
            if tids[i] > max_tid:
                max_tid = tids[i]
        if max_tid >= self.capacity:
            self._grow(max_tid)

        for i in range(n):
            tid = tids[i]
            t = times[i]
            # 1. continue an open repeated-similar chain
            gid = self.chain_group[tid]
            if gid >= 0 and t - self.chain_ts[tid] <= self.window_ms:
                similar = True
                if has_emb and self.emb_dim > 0:
                    acc = 0.0
                    base = tid * self.emb_dim
                    for d in range(self.emb_dim):
                        diff = rows[i, d] - self.chain_emb[base + d]
                        acc += diff * diff
                        if acc >= self.eps_sq:
                            similar = False
                            break
                if similar:
                    out[i] = gid
                    codes[i] = JOIN_SIMILAR
                    self.chain_ts[tid] = t
                    if has_emb and self.emb_dim > 0:
                        base = tid * self.emb_dim
                        for d in range(self.emb_dim):
                            self.chain_emb[base + d] = rows[i, d]
                    continue
            # 2. merge as consequent of a recent rule antecedent
            best_group = -1
            best_ts = -1.0
            if tid < self.n_rule_templates:
                for k in range(self.rule_indptr[tid], self.rule_indptr[tid + 1]):
                    ant = self.rule_ants[k]
                    if ant < self.capacity and self.root_group[ant] >= 0 \
                            and t - self.root_ts[ant] <= self.rule_dts[k] \
                            and self.root_ts[ant] > best_ts:
                        best_ts = self.root_ts[ant]
                        best_group = self.root_group[ant]
            if best_group >= 0:
                out[i] = best_group
                codes[i] = JOIN_RULE
                self.chain_group[tid] = best_group
                self.chain_ts[tid] = t
                if has_emb and self.emb_dim > 0:
                    base = tid * self.emb_dim
                    for d in range(self.emb_dim):
                        self.chain_emb[base + d] = rows[i, d]
                continue
            # 3. open a new group rooted at this template
            gid = self.n_groups
            self.n_groups += 1
            out[i] = gid
            codes[i] = JOIN_NEW
            self.chain_group[tid] = gid
            self.chain_ts[tid] = t
            self.root_group[tid] = gid
            self.root_ts[tid] = t
            if has_emb and self.emb_dim > 0:
                base = tid * self.emb_dim
                for d in range(self.emb_dim):
                    self.chain_emb[base + d] = rows[i, d]

        return out, codes
