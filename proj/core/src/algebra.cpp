#include "dainf/algebra.hpp"

#include <algorithm>

namespace dainf {

DAInfAlgebra::DAInfAlgebra(ModulePtr module, const std::string& unit_label, Truncation trunc)
    : module_(std::move(module)), trunc_(trunc) {
    smodule_ = module_->suspended();
    unit_ = module_->index_of(unit_label);
    if (module_->degree(unit_) != Bidegree{0, 0})
        throw DainfError("unit element must sit at bidegree (0,0): " + unit_label);
}

void DAInfAlgebra::set_op(int i, int j, MultiOp op) {
    if (static_cast<int>(op.arity()) != j) throw DimensionMismatch("set_op: arity disagrees with j");
    if (op.dh() != i || op.dv() != 2 - (i + j))
        throw DainfError("m_{" + std::to_string(i) + "," + std::to_string(j) + "} must have shift (i, 2-(i+j))");
    tilde_.clear();
    ops_[{i, j}] = std::move(op);
}

const MultiOp* DAInfAlgebra::op(int i, int j) const {
    auto it = ops_.find({i, j});
    return it == ops_.end() ? nullptr : &it->second;
}

const MultiOp* DAInfAlgebra::tilde(int i, int j) const {
    auto it = ops_.find({i, j});
    if (it == ops_.end()) return nullptr;
    auto cached = tilde_.find({i, j});
    if (cached == tilde_.end()) {
        MultiOp t = suspend_op(it->second, std::vector<ModulePtr>(static_cast<std::size_t>(j), smodule_), smodule_);
        cached = tilde_.emplace(std::make_pair(i, j), std::move(t)).first;
    }
    return &cached->second;
}

int DAInfAlgebra::max_i() const {
    int m = 0;
    for (const auto& [ij, op] : ops_) {
        (void)op;
        m = std::max(m, ij.first);
    }
    return m;
}

int DAInfAlgebra::max_j() const {
    int m = 1;
    for (const auto& [ij, op] : ops_) {
        (void)op;
        m = std::max(m, ij.second);
    }
    return m;
}

void DAInfMorphism::set_comp(int p, int q, MultiOp f) {
    if (static_cast<int>(f.arity()) != q) throw DimensionMismatch("set_comp: arity disagrees with q");
    if (f.dh() != p || f.dv() != 1 - (p + q))
        throw DainfError("f_{" + std::to_string(p) + "," + std::to_string(q) + "} must have shift (p, 1-(p+q))");
    tilde_.clear();
    comps_[{p, q}] = std::move(f);
}

const MultiOp* DAInfMorphism::comp(int p, int q) const {
    auto it = comps_.find({p, q});
    return it == comps_.end() ? nullptr : &it->second;
}

const MultiOp* DAInfMorphism::tilde(int p, int q) const {
    auto it = comps_.find({p, q});
    if (it == comps_.end()) return nullptr;
    auto cached = tilde_.find({p, q});
    if (cached == tilde_.end()) {
        MultiOp t = suspend_op(it->second, std::vector<ModulePtr>(static_cast<std::size_t>(q), source_->smodule()),
                               target_->smodule());
        cached = tilde_.emplace(std::make_pair(p, q), std::move(t)).first;
    }
    return &cached->second;
}

int DAInfMorphism::max_p() const {
    int m = 0;
    for (const auto& [pq, f] : comps_) {
        (void)f;
        m = std::max(m, pq.first);
    }
    return m;
}

DAInfMorphism DAInfMorphism::identity(const AlgebraPtr& E) {
    DAInfMorphism f(E, E);
    f.set_comp(0, 1, graded_to_multiop(GradedMap::identity(E->module())));
    return f;
}

bool DAInfMorphism::equal_to(const DAInfMorphism& o) const {
    std::set<std::pair<int, int>> keys;
    for (const auto& [k, v] : comps_) {
        (void)v;
        keys.insert(k);
    }
    for (const auto& [k, v] : o.comps_) {
        (void)v;
        keys.insert(k);
    }
    for (const auto& k : keys) {
        const MultiOp* a = comp(k.first, k.second);
        const MultiOp* b = o.comp(k.first, k.second);
        if (a && b) {
            if (!a->equal_to(*b)) return false;
        } else if (a && !a->is_zero_op()) {
            return false;
        } else if (b && !b->is_zero_op()) {
            return false;
        }
    }
    return true;
}

void DAInfHomotopy::set_comp(int i, int j, MultiOp h) {
    if (static_cast<int>(h.arity()) != j) throw DimensionMismatch("homotopy comp: arity disagrees");
    if (h.dh() != i || h.dv() != -1 - i)
        throw DainfError("htilde_{" + std::to_string(i) + "," + std::to_string(j) + "} must have shift (i, -1-i)");
    comps_[{i, j}] = std::move(h);
}

const MultiOp* DAInfHomotopy::comp(int i, int j) const {
    auto it = comps_.find({i, j});
    return it == comps_.end() ? nullptr : &it->second;
}

std::string OpCheckReport::summary() const {
    std::string s = "checked=" + std::to_string(checked) + " unchecked=" + std::to_string(unchecked) +
                    " failures=" + std::to_string(failures.size());
    for (std::size_t i = 0; i < failures.size() && i < 4; ++i) s += "\n  " + failures[i];
    return s;
}

void OpCheckReport::merge(const OpCheckReport& o) {
    checked += o.checked;
    unchecked += o.unchecked;
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
}

TensorElem tuple_elem(const TupleKey& k) {
    TensorElem x;
    x.terms.emplace(k, Scalar(1, 1));
    return x;
}

TensorElem alg_mtilde_q(const DAInfAlgebra& E, int i, int q, const TensorElem& x, std::size_t n) {
    const Ring& ring = E.ring();
    TensorElem out;
    out.escaped = x.escaped;
    if (q < 1 || static_cast<std::size_t>(q) > n) return out;
    int s_inner = static_cast<int>(n) - q + 1;
    const MultiOp* op = E.tilde(i, s_inner);
    if (!op) return out;
    std::vector<ModulePtr> mods(n, E.smodule());
    for (int r = 0; r < q; ++r) {
        TensorElem part = apply_middle(*op, static_cast<std::size_t>(r), x, mods);
        out.add_all(ring, part, Scalar(1, 1));
    }
    return out;
}

TensorElem mor_ftilde_j(const DAInfMorphism& f, int p, std::size_t j, const TensorElem& x, std::size_t n) {
    const Ring& ring = f.source()->ring();
    TensorElem out;
    out.escaped = x.escaped;
    if (j < 1 || j > n) return out;
    if (j == 1) {
        const MultiOp* op = f.tilde(p, static_cast<int>(n));
        if (!op) return out;
        std::vector<ModulePtr> mods(n, f.source()->smodule());
        TensorElem part = apply_middle(*op, 0, x, mods);
        out.add_all(ring, part, Scalar(1, 1));
        return out;
    }
    const ModulePtr& SE = f.source()->smodule();
    for (const auto& [key, coef] : x.terms) {
        for (std::size_t q1 = 1; q1 + (j - 1) <= n; ++q1) {
            for (int p1 = 0; p1 <= p; ++p1) {
                const MultiOp* first = f.tilde(p1, static_cast<int>(q1));
                if (!first) continue;
                TupleKey head(key.begin(), key.begin() + static_cast<long>(q1));
                TupleKey tail(key.begin() + static_cast<long>(q1), key.end());
                OpVal hv = first->value(head);
                if (hv.is_escaped()) {
                    out.escaped = true;
                    continue;
                }
                if (hv.vec.empty()) continue;
                TensorElem rest = mor_ftilde_j(f, p - p1, j - 1, tuple_elem(tail), n - q1);
                if (rest.escaped) out.escaped = true;
                if (rest.terms.empty()) continue;
                Bidegree head_deg{0, 0};
                for (Index hi : head) head_deg = head_deg + SE->degree(hi);
                int rem = p - p1;
                int sign = koszul_exponent(head_deg, Bidegree{rem, -rem});
                Scalar c = sign ? neg(ring, coef) : coef;
                for (const auto& [hl, hc] : hv.vec.terms)
                    for (const auto& [rk, rc] : rest.terms) {
                        TupleKey nk;
                        nk.reserve(j);
                        nk.push_back(hl);
                        nk.insert(nk.end(), rk.begin(), rk.end());
                        out.add(ring, nk, mul(ring, mul(ring, c, hc), rc));
                    }
            }
        }
    }
    return out;
}

/* ---------- shared bar-module construction ---------- */

namespace {

struct BarModule {
    ModulePtr module;
    std::vector<TupleKey> tuples; /* aligned with module indices */
};

std::string bar_label(const ModulePtr& SM, const TupleKey& k) {
    std::string lbl = "(";
    for (std::size_t w = 0; w < k.size(); ++w) {
        if (w) lbl += "|";
        lbl += SM->label(k[w]);
    }
    return lbl + ")";
}

BarModule build_bar_module(const ModulePtr& SE, int tensor_len, int s_cap, bool truncated) {
    std::vector<std::pair<std::string, Bidegree>> basis;
    std::vector<TupleKey> keys;
    int tmin = 0, tmax = 0;
    bool first = true;
    for (int len = 1; len <= tensor_len; ++len) {
        std::vector<ModulePtr> mods(static_cast<std::size_t>(len), SE);
        for_each_tuple(mods, s_cap, [&](const TupleKey& k) {
            Bidegree d{0, 0};
            for (Index idx : k) d = d + SE->degree(idx);
            if (first || d.t < tmin) tmin = d.t;
            if (first || d.t > tmax) tmax = d.t;
            first = false;
            basis.push_back({bar_label(SE, k), d});
            keys.push_back(k);
        });
    }
    BigradedModule::Builder b(SE->ring(), SupportBox{s_cap, tmin, tmax}, truncated);
    for (auto& [lbl, d] : basis) b.add(lbl, d.s, d.t);
    BarModule out;
    out.module = b.build();
    out.tuples.resize(out.module->dim());
    for (std::size_t c = 0; c < keys.size(); ++c)
        out.tuples[out.module->index_of(basis[c].first)] = keys[c];
    return out;
}

struct RelationTally {
    OpCheckReport rep;
    void record(bool escaped, bool failed, const std::string& where, const std::string& what) {
        if (escaped)
            rep.unchecked += 1;
        else if (failed)
            rep.failures.push_back(where + ": " + what);
        else
            rep.checked += 1;
    }
};

std::string tuple_str(const ModulePtr& m, const TupleKey& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (i) s += ",";
        s += m->label(k[i]);
    }
    return s + ")";
}

bool tuple_has_unit(const TupleKey& k, Index unit) {
    return std::find(k.begin(), k.end(), unit) != k.end();
}

}  // namespace

OpCheckReport check_algebra(const DAInfAlgebra& E, CheckOptions opt) {
    const Ring& ring = E.ring();
    const ModulePtr& M = E.module();
    int J = opt.arity_max > 0 ? opt.arity_max : E.truncation().arity_max;
    int bound = opt.relation_bound >= 0 ? opt.relation_bound : E.truncation().effective_relation_bound();
    RelationTally tally;

    /* unit conditions */
    Index unit = E.unit();
    if (opt.check_units) {
        const MultiOp* m01 = E.op(0, 1);
        if (m01) {
            OpVal v = m01->value({unit});
            tally.record(v.is_escaped(), !v.is_escaped() && !v.vec.empty(), "unit", "m_{01}(eta) != 0");
        }
        const MultiOp* m02 = E.op(0, 2);
        if (!m02) {
            tally.rep.failures.push_back("unit: m_{02} missing");
        } else {
            for (Index x = 0; x < M->dim(); ++x) {
                OpVal l = m02->value({unit, x});
                OpVal r = m02->value({x, unit});
                bool esc = l.is_escaped() || r.is_escaped();
                bool bad = !esc && (!(l.vec == unit_vec(x)) || !(r.vec == unit_vec(x)));
                tally.record(esc, bad, "unit at " + M->label(x), "m_{02}(eta (x) 1) or m_{02}(1 (x) eta) != id");
            }
        }
        if (opt.assert_unit_zero) {
            for (const auto& [ij, op] : E.ops()) {
                if (ij.first + ij.second < 3) continue;
                for (const auto& [k, v] : op.table()) {
                    if (!tuple_has_unit(k, unit)) continue;
                    bool esc = v.is_escaped();
                    bool bad = !esc && !v.vec.empty();
                    tally.record(esc, bad,
                                 "unit in m_{" + std::to_string(ij.first) + "," + std::to_string(ij.second) +
                                     "} at " + tuple_str(M, k),
                                 "must vanish on unit tuples");
                }
            }
        }
    }

    int max_i = E.max_i(), max_j = E.max_j();
    for (int v = 1; v <= J; ++v) {
        for (int u = 0; u + v <= bound && u <= 2 * max_i; ++u) {
            struct Term {
                const MultiOp* outer;
                const MultiOp* inner;
                int r, sign;
            };
            std::vector<Term> terms;
            for (int j = 1; j <= std::min(max_j, v); ++j) {
                int q = v + 1 - j;
                if (q < 1 || q > max_j) continue;
                for (int i = 0; i <= u; ++i) {
                    int p = u - i;
                    const MultiOp* outer = E.op(i, j);
                    const MultiOp* inner = E.op(p, q);
                    if (!outer || !inner) continue;
                    for (int r = 0; r + 1 <= j; ++r) {
                        int t = j - 1 - r;
                        terms.push_back({outer, inner, r, (r * q + t + p * j) & 1});
                    }
                }
            }
            if (terms.empty()) continue;
            std::vector<ModulePtr> mods(static_cast<std::size_t>(v), M);
            for_each_tuple(mods, M->box().s_max, [&](const TupleKey& key) {
                TensorElem x = tuple_elem(key);
                SparseVec acc;
                bool escaped = false;
                for (const Term& tm : terms) {
                    TensorElem mid = apply_middle(*tm.inner, static_cast<std::size_t>(tm.r), x, mods);
                    OpVal val = apply_full(*tm.outer, mid, mods);
                    if (val.is_escaped()) {
                        escaped = true;
                        break;
                    }
                    acc.add_scaled(ring, val.vec, from_int(ring, tm.sign ? -1 : 1));
                }
                tally.record(escaped, !escaped && !acc.empty(),
                             "(u,v)=(" + std::to_string(u) + "," + std::to_string(v) + ") at " + tuple_str(M, key),
                             escaped ? "" : "residual " + acc.str(*M));
            });
        }
    }
    return tally.rep;
}

TwistedComplex encode_algebra(const DAInfAlgebra& E, int tensor_len) {
    if (tensor_len < 1) throw DainfError("encode_algebra: tensor_len must be >= 1");
    const ModulePtr& SE = E.smodule();
    const Ring& ring = E.ring();
    BarModule bar = build_bar_module(SE, tensor_len, E.module()->box().s_max, E.module()->truncated());
    const ModulePtr& T = bar.module;

    TwistedComplex X;
    X.module = T;
    for (int i = 0; i <= E.max_i(); ++i) {
        bool have = false;
        for (int j = 1; j <= E.max_j(); ++j)
            if (E.tilde(i, j)) have = true;
        if (!have) continue;
        GradedMap di(T, T, i, 1 - i);
        for (Index c = 0; c < T->dim(); ++c) {
            const TupleKey& k = bar.tuples[c];
            std::size_t n = k.size();
            SparseVec acc;
            bool escaped = false;
            for (int q = 1; q <= static_cast<int>(n); ++q) {
                TensorElem part = alg_mtilde_q(E, i, q, tuple_elem(k), n);
                if (part.escaped) {
                    escaped = true;
                    break;
                }
                for (const auto& [ok, oc] : part.terms) acc.add_term(ring, T->index_of(bar_label(SE, ok)), oc);
            }
            if (escaped)
                di.mark_escaped(c);
            else
                di.set_col(c, std::move(acc));
        }
        X.set_diff(i, std::move(di));
    }
    if (X.diffs.empty()) X.set_diff(0, GradedMap::zero(T, T, 0, 1));
    return X;
}

/* ---------- morphisms ---------- */

namespace {

TensorElem apply_unsusp_tensor(const DAInfMorphism& f, const std::vector<std::pair<int, int>>& pq,
                               const TupleKey& key) {
    const Ring& ring = f.source()->ring();
    const ModulePtr& E = f.source()->module();
    TensorElem out;
    std::vector<const MultiOp*> ops;
    for (auto& [p, q] : pq) {
        const MultiOp* op = f.comp(p, q);
        if (!op) return out;
        ops.push_back(op);
    }
    int sign = 0;
    {
        Bidegree prefix{0, 0};
        std::size_t pos = 0;
        for (std::size_t w = 0; w < pq.size(); ++w) {
            Bidegree shift{pq[w].first, 1 - pq[w].first - pq[w].second};
            if (w > 0) sign ^= koszul_exponent(prefix, shift);
            for (int x = 0; x < pq[w].second; ++x) prefix = prefix + E->degree(key[pos++]);
        }
    }
    std::vector<OpVal> vals;
    std::size_t pos = 0;
    for (std::size_t w = 0; w < pq.size(); ++w) {
        TupleKey block(key.begin() + static_cast<long>(pos), key.begin() + static_cast<long>(pos + pq[w].second));
        pos += static_cast<std::size_t>(pq[w].second);
        OpVal v = ops[w]->value(block);
        if (v.is_escaped()) {
            out.escaped = true;
            return out;
        }
        if (v.vec.empty()) return out;
        vals.push_back(std::move(v));
    }
    std::vector<std::pair<TupleKey, Scalar>> cur{{TupleKey{}, from_int(ring, sign ? -1 : 1)}};
    for (const auto& v : vals) {
        std::vector<std::pair<TupleKey, Scalar>> next;
        for (auto& [k, c] : cur)
            for (const auto& [l, x] : v.vec.terms) {
                TupleKey nk = k;
                nk.push_back(l);
                next.push_back({std::move(nk), mul(ring, c, x)});
            }
        cur = std::move(next);
    }
    for (auto& [k, c] : cur) out.add(ring, k, c);
    return out;
}

int morphism_sigma(int u, const std::vector<std::pair<int, int>>& pq) {
    int j = static_cast<int>(pq.size());
    long sigma = u;
    auto P = [&](int w) { return pq[static_cast<std::size_t>(w - 1)].first; };
    auto Q = [&](int w) { return pq[static_cast<std::size_t>(w - 1)].second; };
    for (int w = 1; w <= j - 1; ++w) {
        long tail = 0;
        for (int s = j - w + 1; s <= j; ++s) tail += P(s) + Q(s);
        sigma += static_cast<long>(j) * P(w) + static_cast<long>(w) * (Q(j - w) - P(w)) +
                 static_cast<long>(Q(j - w)) * tail;
    }
    return static_cast<int>(((sigma % 2) + 2) % 2);
}

void compositions_rec(int total, int parts, int min_part, std::vector<int>& cur,
                      const std::function<void(const std::vector<int>&)>& fn) {
    if (parts == 1) {
        if (total >= min_part) {
            cur.push_back(total);
            fn(cur);
            cur.pop_back();
        }
        return;
    }
    for (int x = min_part; x <= total - min_part * (parts - 1); ++x) {
        cur.push_back(x);
        compositions_rec(total - x, parts - 1, min_part, cur, fn);
        cur.pop_back();
    }
}

void for_compositions(int total, int parts, int min_part, const std::function<void(const std::vector<int>&)>& fn) {
    if (parts <= 0) return;
    std::vector<int> cur;
    compositions_rec(total, parts, min_part, cur, fn);
}

}  // namespace

OpCheckReport check_morphism(const DAInfMorphism& f, CheckOptions opt) {
    const DAInfAlgebra& E = *f.source();
    const DAInfAlgebra& F = *f.target();
    const Ring& ring = E.ring();
    const ModulePtr& M = E.module();
    int J = opt.arity_max > 0 ? opt.arity_max : E.truncation().arity_max;
    int bound = opt.relation_bound >= 0 ? opt.relation_bound : E.truncation().effective_relation_bound();
    RelationTally tally;

    if (opt.check_units) {
        const MultiOp* f01 = f.comp(0, 1);
        OpVal v = f01 ? f01->value({E.unit()}) : OpVal::zero_val();
        bool esc = v.is_escaped();
        bool bad = !esc && !(v.vec == unit_vec(F.unit()));
        tally.record(esc, bad, "unit", "f_{01}(eta_E) != eta_F");
        if (opt.assert_unit_zero) {
            for (const auto& [pqk, op] : f.comps()) {
                if (pqk.first + pqk.second < 2) continue;
                for (const auto& [k, val] : op.table()) {
                    if (!tuple_has_unit(k, E.unit())) continue;
                    bool esc2 = val.is_escaped();
                    bool bad2 = !esc2 && !val.vec.empty();
                    tally.record(esc2, bad2,
                                 "unit in f_{" + std::to_string(pqk.first) + "," + std::to_string(pqk.second) + "}",
                                 "must vanish on unit tuples");
                }
            }
        }
    }

    int max_p = f.max_p();
    int umax = std::max(E.max_i() + max_p, F.max_i() + J * max_p);
    umax = std::max(umax, 2 * std::max(E.max_i(), F.max_i()));
    for (int v = 1; v <= J; ++v) {
        std::vector<ModulePtr> mods(static_cast<std::size_t>(v), M);
        for (int u = 0; u + v <= bound && u <= umax; ++u) {
            struct RTerm {
                const MultiOp* outer;
                std::vector<std::pair<int, int>> pq;
                int sign;
            };
            std::vector<RTerm> rterms;
            for (int j = 1; j <= v; ++j) {
                for_compositions(v, j, 1, [&](const std::vector<int>& qs) {
                    for_compositions(u, j + 1, 0, [&](const std::vector<int>& ps_plus) {
                        int i = ps_plus[static_cast<std::size_t>(j)];
                        const MultiOp* outer = F.op(i, j);
                        if (!outer) return;
                        std::vector<std::pair<int, int>> pq(static_cast<std::size_t>(j));
                        for (int w = 0; w < j; ++w) {
                            pq[static_cast<std::size_t>(w)] = {ps_plus[static_cast<std::size_t>(w)],
                                                               qs[static_cast<std::size_t>(w)]};
                            if (!f.comp(pq[static_cast<std::size_t>(w)].first,
                                        pq[static_cast<std::size_t>(w)].second))
                                return;
                        }
                        int sg = morphism_sigma(u, pq);
                        rterms.push_back({outer, std::move(pq), sg});
                    });
                });
            }
            struct LTerm {
                const MultiOp* outer;
                const MultiOp* inner;
                int r, sign;
            };
            std::vector<LTerm> lterms;
            for (int j = 1; j <= v; ++j) {
                int q = v + 1 - j;
                if (q < 1) continue;
                for (int i = 0; i <= u; ++i) {
                    int p = u - i;
                    const MultiOp* fij = f.comp(i, j);
                    const MultiOp* mpq = E.op(p, q);
                    if (!fij || !mpq) continue;
                    for (int r = 0; r + 1 <= j; ++r) {
                        int t = j - 1 - r;
                        lterms.push_back({fij, mpq, r, (r * q + t + p * j) & 1});
                    }
                }
            }
            if (rterms.empty() && lterms.empty()) continue;
            for_each_tuple(mods, M->box().s_max, [&](const TupleKey& key) {
                TensorElem x = tuple_elem(key);
                SparseVec acc;
                bool escaped = false;
                for (const LTerm& tm : lterms) {
                    TensorElem mid = apply_middle(*tm.inner, static_cast<std::size_t>(tm.r), x, mods);
                    OpVal val = apply_full(*tm.outer, mid, mods);
                    if (val.is_escaped()) {
                        escaped = true;
                        break;
                    }
                    acc.add_scaled(ring, val.vec, from_int(ring, tm.sign ? -1 : 1));
                }
                if (!escaped) {
                    for (const RTerm& tm : rterms) {
                        TensorElem mid = apply_unsusp_tensor(f, tm.pq, key);
                        if (mid.escaped) {
                            escaped = true;
                            break;
                        }
                        OpVal val = apply_full(*tm.outer, mid, mods);
                        if (val.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        acc.add_scaled(ring, val.vec, from_int(ring, tm.sign ? 1 : -1));
                    }
                }
                tally.record(escaped, !escaped && !acc.empty(),
                             "morphism (u,v)=(" + std::to_string(u) + "," + std::to_string(v) + ") at " +
                                 tuple_str(M, key),
                             escaped ? "" : "residual " + acc.str(*F.module()));
            });
        }
    }
    return tally.rep;
}

TwistedMap encode_morphism(const DAInfMorphism& f, int tensor_len) {
    TwistedComplex src = encode_algebra(*f.source(), tensor_len);
    TwistedComplex tgt = encode_algebra(*f.target(), tensor_len);
    const Ring& ring = f.source()->ring();
    const ModulePtr& SE = f.source()->smodule();
    const ModulePtr& SF = f.target()->smodule();
    BarModule src_bar = build_bar_module(SE, tensor_len, f.source()->module()->box().s_max,
                                         f.source()->module()->truncated());

    TwistedMap out;
    out.source = src;
    out.target = tgt;
    for (int p = 0; p <= f.max_p(); ++p) {
        GradedMap fp(src.module, tgt.module, p, -p);
        bool any = false;
        for (Index c = 0; c < src.module->dim(); ++c) {
            const TupleKey& k = src_bar.tuples[c];
            std::size_t n = k.size();
            SparseVec acc;
            bool escaped = false;
            for (std::size_t j = 1; j <= n; ++j) {
                TensorElem part = mor_ftilde_j(f, p, j, tuple_elem(k), n);
                if (part.escaped) {
                    escaped = true;
                    break;
                }
                for (const auto& [ok, oc] : part.terms) {
                    std::string lbl = bar_label(SF, ok);
                    if (!tgt.module->has_label(lbl)) {
                        escaped = true;
                        break;
                    }
                    acc.add_term(ring, tgt.module->index_of(lbl), oc);
                }
                if (escaped) break;
            }
            if (escaped) {
                fp.mark_escaped(c);
                any = true;
            } else if (!acc.empty()) {
                fp.set_col(c, std::move(acc));
                any = true;
            }
        }
        if (any || p == 0) out.set_comp(p, std::move(fp));
    }
    return out;
}

DAInfMorphism compose_morphisms(const DAInfMorphism& f, const DAInfMorphism& g) {
    if (f.source().get() != g.target().get() &&
        !BigradedModule::same_basis(*f.source()->module(), *g.target()->module()))
        throw DimensionMismatch("compose_morphisms: middle algebras disagree");
    const DAInfAlgebra& D = *g.source();
    const DAInfAlgebra& F = *f.target();
    const Ring& ring = D.ring();
    DAInfMorphism out(g.source(), f.target());
    int pmax = f.max_p() + g.max_p();
    int J = D.truncation().arity_max;
    const ModulePtr& SD = D.smodule();
    for (int u = 0; u <= pmax; ++u) {
        for (int v = 1; v <= J; ++v) {
            MultiOp comp_t = MultiOp::uniform(SD, static_cast<std::size_t>(v), F.smodule(), u, -u);
            std::vector<ModulePtr> mods(static_cast<std::size_t>(v), SD);
            for_each_tuple(mods, D.module()->box().s_max, [&](const TupleKey& key) {
                SparseVec acc;
                bool escaped = false;
                for (int i = 0; i <= u && !escaped; ++i) {
                    int p = u - i;
                    for (std::size_t j = 1; j <= static_cast<std::size_t>(v); ++j) {
                        const MultiOp* fij = f.tilde(i, static_cast<int>(j));
                        if (!fij) continue;
                        TensorElem mid = mor_ftilde_j(g, p, j, tuple_elem(key), static_cast<std::size_t>(v));
                        OpVal val = apply_full(*fij, mid, mods);
                        if (val.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        acc.add_scaled(ring, val.vec, Scalar(1, 1));
                    }
                }
                if (escaped)
                    comp_t.mark_escaped(key);
                else if (!acc.empty())
                    comp_t.set_value(key, std::move(acc));
            });
            if (!comp_t.is_zero_op()) {
                MultiOp plain = unsuspend_op(comp_t, std::vector<ModulePtr>(static_cast<std::size_t>(v), D.module()),
                                             F.module());
                out.set_comp(u, v, std::move(plain));
            }
        }
    }
    if (out.comps().empty()) out.set_comp(0, 1, MultiOp::uniform(D.module(), 1, F.module(), 0, 0));
    return out;
}

bool morphisms_agree(const DAInfMorphism& a, const DAInfMorphism& b) {
    std::set<std::pair<int, int>> keys;
    for (const auto& [k, v] : a.comps()) {
        (void)v;
        keys.insert(k);
    }
    for (const auto& [k, v] : b.comps()) {
        (void)v;
        keys.insert(k);
    }
    for (const auto& pq : keys) {
        const MultiOp* x = a.comp(pq.first, pq.second);
        const MultiOp* y = b.comp(pq.first, pq.second);
        if (x && y) {
            if (!ops_agree(*x, *y)) return false;
        } else if (x ? !op_certified_zero(*x) : !op_certified_zero(*y)) {
            return false;
        }
    }
    return true;
}

AlgebraClass classify(const DAInfAlgebra& E) {
    bool dga = true, bidga = true, tdga = true;
    for (const auto& [ij, op] : E.ops()) {
        if (op.is_zero_op()) continue;
        auto [i, j] = ij;
        if (!(i == 0 && (j == 1 || j == 2))) dga = false;
        if (i + j > 2) bidga = false;
        if (!(j == 1 || (i == 0 && j == 2))) tdga = false;
    }
    if (dga) return AlgebraClass::dga;
    if (bidga) return AlgebraClass::bidga;
    if (tdga) return AlgebraClass::tdga;
    return AlgebraClass::general;
}

std::string class_name(AlgebraClass c) {
    switch (c) {
        case AlgebraClass::dga: return "dga";
        case AlgebraClass::bidga: return "bidga";
        case AlgebraClass::tdga: return "tdga";
        case AlgebraClass::general: return "general";
    }
    return "?";
}

TwistedComplex underlying_twisted(const DAInfAlgebra& E) {
    TwistedComplex X;
    X.module = E.module();
    for (const auto& [ij, op] : E.ops()) {
        if (ij.second != 1) continue;
        X.set_diff(ij.first, multiop_to_graded(op));
    }
    if (X.diffs.empty()) X.set_diff(0, GradedMap::zero(E.module(), E.module(), 0, 1));
    return X;
}

TotDga tot_tdga(const DAInfAlgebra& T) {
    if (!class_is_tdga(classify(T))) throw NotATdga("tot_tdga: algebra is not a twisted dga");
    TotDga out;
    out.tot = total_complex(underlying_twisted(T));
    const ModulePtr& M0 = out.tot.module0;
    const ModulePtr& M = T.module();
    const Ring& ring = T.ring();

    Truncation trunc = T.truncation();
    trunc.box = M0->box();
    auto alg = std::make_shared<DAInfAlgebra>(M0, T.unit_label(), trunc);
    alg->set_op(0, 1, graded_to_multiop(out.tot.twisted.diffs.at(0)));

    const MultiOp* mu = T.op(0, 2);
    MultiOp mu0 = MultiOp::uniform(M0, 2, M0, 0, 0);
    if (mu) {
        for (Index a = 0; a < M0->dim(); ++a) {
            Index oa = M->index_of(M0->label(a));
            Bidegree da = M->degree(oa);
            for (Index b = 0; b < M0->dim(); ++b) {
                Index ob = M->index_of(M0->label(b));
                Bidegree db = M->degree(ob);
                OpVal v = mu->value({oa, ob});
                if (v.is_escaped()) {
                    mu0.mark_escaped({a, b});
                    continue;
                }
                if (v.vec.empty()) continue;
                int sign = ((da.s + da.t) * db.s) & 1;
                SparseVec nv;
                for (const auto& [l, c] : v.vec.terms)
                    nv.add_term(ring, M0->index_of(M->label(l)), sign ? neg(ring, c) : c);
                mu0.set_value({a, b}, std::move(nv));
            }
        }
    }
    alg->set_op(0, 2, std::move(mu0));
    out.dga = alg;
    return out;
}

DAInfMorphism rho_tdga(const AlgebraPtr& T, const TotDga& tot) {
    DAInfMorphism r(T, tot.dga);
    const ModulePtr& M = T->module();
    const ModulePtr& M0 = tot.tot.module0;
    int smax = 0;
    for (Index i = 0; i < M->dim(); ++i) smax = std::max(smax, M->degree(i).s);
    for (int p = 0; p <= smax; ++p) {
        MultiOp fp = MultiOp::uniform(M, 1, M0, p, -p);
        bool any = false;
        for (Index x = 0; x < M->dim(); ++x) {
            if (M->degree(x).s != p) continue;
            fp.set_value({x}, unit_vec(M0->index_of(M->label(x))));
            any = true;
        }
        if (any || p == 0) r.set_comp(p, 1, std::move(fp));
    }
    return r;
}

OpCheckReport check_homotopy(const DAInfHomotopy& h, CheckOptions opt) {
    const DAInfMorphism& g = h.from_g();
    const DAInfMorphism& f = h.to_f();
    const DAInfAlgebra& E = *f.source();
    const DAInfAlgebra& C = *f.target();
    if (g.source().get() != f.source().get() || g.target().get() != f.target().get())
        throw PreconditionViolated("check_homotopy: morphisms must share source and target");
    if (E.op(0, 1) && !E.op(0, 1)->is_zero_op())
        throw PreconditionViolated("check_homotopy: source must be minimal");
    if (!class_is_bidga(classify(C))) throw PreconditionViolated("check_homotopy: target must be a bidga");

    const Ring& ring = E.ring();
    const ModulePtr& SE = E.smodule();
    const ModulePtr& SC = C.smodule();
    RelationTally tally;

    for (const auto& [ij, op] : h.comps()) {
        for (const auto& [k, v] : op.table()) {
            if (!tuple_has_unit(k, E.unit())) continue;
            bool esc = v.is_escaped();
            bool bad = !esc && !v.vec.empty();
            tally.record(esc, bad,
                         "unit in htilde_{" + std::to_string(ij.first) + "," + std::to_string(ij.second) + "}",
                         "must vanish on unit tuples");
        }
    }

    int J = opt.arity_max > 0 ? opt.arity_max : E.truncation().arity_max;
    int bound = opt.relation_bound >= 0 ? opt.relation_bound : E.truncation().effective_relation_bound();
    int hmax = 0;
    for (const auto& [ij, op] : h.comps()) {
        (void)op;
        hmax = std::max(hmax, ij.first);
    }
    int umax = std::max({2 + hmax, f.max_p() + E.max_i(), g.max_p() + E.max_i(), 2 * E.max_i()});

    const MultiOp* mu = C.tilde(0, 2);
    const MultiOp* d0 = C.tilde(0, 1);
    const MultiOp* d1 = C.tilde(1, 1);

    for (int v = 1; v <= J; ++v) {
        std::vector<ModulePtr> mods(static_cast<std::size_t>(v), SE);
        for (int u = 0; u <= umax && u + v <= bound; ++u) {
            for_each_tuple(mods, E.module()->box().s_max, [&](const TupleKey& key) {
                SparseVec acc; /* LHS - RHS */
                bool escaped = false;
                auto add_tilde = [&](const MultiOp* op, int negate) {
                    if (!op || escaped) return;
                    OpVal val = op->value(key);
                    if (val.is_escaped()) {
                        escaped = true;
                        return;
                    }
                    acc.add_scaled(ring, val.vec, from_int(ring, negate ? -1 : 1));
                };
                add_tilde(g.tilde(u, v), 0);
                add_tilde(f.tilde(u, v), 1);

                auto pair_term = [&](const MultiOp* a, const MultiOp* bop, int sgn) {
                    if (!a || !bop || !mu || escaped) return;
                    std::size_t ja = a->arity(), jb = bop->arity();
                    if (ja + jb != static_cast<std::size_t>(v)) return;
                    TupleKey head(key.begin(), key.begin() + static_cast<long>(ja));
                    TupleKey tail(key.begin() + static_cast<long>(ja), key.end());
                    OpVal av = a->value(head);
                    OpVal bv = bop->value(tail);
                    if (av.is_escaped() || bv.is_escaped()) {
                        escaped = true;
                        return;
                    }
                    if (av.vec.empty() || bv.vec.empty()) return;
                    Bidegree hd{0, 0};
                    for (Index hi : head) hd = hd + SE->degree(hi);
                    int ksign = koszul_exponent(hd, bop->shift());
                    for (const auto& [la, ca] : av.vec.terms)
                        for (const auto& [lb, cb] : bv.vec.terms) {
                            OpVal mv = mu->value({la, lb});
                            if (mv.is_escaped()) {
                                escaped = true;
                                return;
                            }
                            Scalar c = mul(ring, ca, cb);
                            if ((sgn ^ ksign) & 1) c = neg(ring, c);
                            acc.add_scaled(ring, mv.vec, neg(ring, c));
                        }
                };
                for (int i = 0; i <= u && !escaped; ++i) {
                    int p = u - i;
                    for (int j = 1; j < v; ++j) {
                        int q = v - j;
                        (void)q;
                        pair_term(g.tilde(i, j), h.comp(p, v - j), u & 1);
                        pair_term(h.comp(i, j), f.tilde(p, v - j), i & 1);
                    }
                }
                auto post_term = [&](const MultiOp* dop, const MultiOp* hop, int sgn) {
                    if (!dop || !hop || escaped) return;
                    OpVal hv = hop->value(key);
                    if (hv.is_escaped()) {
                        escaped = true;
                        return;
                    }
                    for (const auto& [l, c] : hv.vec.terms) {
                        OpVal dv = dop->value({l});
                        if (dv.is_escaped()) {
                            escaped = true;
                            return;
                        }
                        /* subtract (-1)^{sgn} * dop(hop) */
                        acc.add_scaled(ring, dv.vec, sgn ? c : neg(ring, c));
                    }
                };
                post_term(d0, h.comp(u, v), u & 1);
                post_term(d1, h.comp(u - 1, v), u & 1);
                for (int i = 0; i <= u && !escaped; ++i) {
                    int p = u - i;
                    for (int j = 1; j <= v; ++j) {
                        const MultiOp* hij = h.comp(i, j);
                        if (!hij) continue;
                        TensorElem mid = alg_mtilde_q(E, p, j, tuple_elem(key), static_cast<std::size_t>(v));
                        OpVal val = apply_full(*hij, mid, mods);
                        if (val.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        acc.add_scaled(ring, val.vec, from_int(ring, -1));
                    }
                }
                tally.record(escaped, !escaped && !acc.empty(),
                             "homotopy (u,v)=(" + std::to_string(u) + "," + std::to_string(v) + ") at " +
                                 tuple_str(SE, key),
                             escaped ? "" : "residual " + acc.str(*SC));
            });
        }
    }
    return tally.rep;
}

}  // namespace dainf
