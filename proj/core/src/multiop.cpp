#include "dainf/multiop.hpp"

namespace dainf {

void MultiOp::set_value(const TupleKey& k, SparseVec v) {
    if (k.size() != arity()) throw DimensionMismatch("MultiOp::set_value: arity mismatch");
    Bidegree want = tuple_degree(k) - shift();
    for (const auto& [j, c] : v.terms) {
        (void)c;
        if (target_->degree(j) != want)
            throw DainfError("multilinear value lands off-degree (want " + want.str() + ", got " +
                             target_->degree(j).str() + " for " + target_->label(j) + ")");
    }
    if (v.empty()) {
        /* explicit zero: only interesting when the default would escape */
        table_[k] = OpVal::zero_val();
    } else {
        table_[k] = OpVal{OpVal::State::set, std::move(v)};
    }
}

OpVal MultiOp::value(const TupleKey& k) const {
    auto it = table_.find(k);
    if (it != table_.end()) return it->second;
    Bidegree out = tuple_degree(k) - shift();
    if (target_->box().contains(out)) return OpVal::zero_val();
    return target_->truncated() ? OpVal::escaped_val() : OpVal::zero_val();
}

bool MultiOp::is_zero_op() const {
    for (const auto& [k, v] : table_) {
        (void)k;
        if (v.state == OpVal::State::escaped || !v.vec.empty()) return false;
    }
    return true;
}

bool MultiOp::equal_to(const MultiOp& o) const {
    if (arity() != o.arity() || dh_ != o.dh_ || dv_ != o.dv_) return false;
    /* compare over the union of keys using value() so implicit zeros match */
    auto cmp_keys = [&](const std::map<TupleKey, OpVal>& t) {
        for (const auto& [k, v] : t) {
            (void)v;
            OpVal a = value(k), b = o.value(k);
            if (a.state == OpVal::State::escaped || b.state == OpVal::State::escaped) {
                if (a.state != b.state) return false;
                continue;
            }
            if (!(a.vec == b.vec)) return false;
        }
        return true;
    };
    return cmp_keys(table_) && cmp_keys(o.table_);
}

void MultiOp::accumulate(const TupleKey& k, const OpVal& v, const Scalar& scale) {
    const Ring& ring = target_->ring();
    if (v.is_escaped()) {
        table_[k] = OpVal::escaped_val();
        return;
    }
    auto it = table_.find(k);
    if (it != table_.end() && it->second.is_escaped()) return;
    OpVal cur = value(k);
    if (cur.is_escaped()) {
        table_[k] = OpVal::escaped_val();
        return;
    }
    cur.vec.add_scaled(ring, v.vec, scale);
    cur.state = OpVal::State::set;
    table_[k] = std::move(cur);
}

std::string MultiOp::str() const {
    std::string s;
    for (const auto& [k, v] : table_) {
        std::string in;
        for (std::size_t w = 0; w < k.size(); ++w) {
            if (w) in += ",";
            in += sources_[w]->label(k[w]);
        }
        s += "(" + in + ") -> " + (v.is_escaped() ? std::string("<escaped>") : v.vec.str(*target_)) + "\n";
    }
    return s;
}

bool ops_agree(const MultiOp& got, const MultiOp& expected, bool require_certified) {
    if (got.arity() != expected.arity() || got.dh() != expected.dh() || got.dv() != expected.dv()) return false;
    auto scan = [&](const std::map<TupleKey, OpVal>& table) {
        for (const auto& [k, v] : table) {
            (void)v;
            OpVal g = got.value(k), e = expected.value(k);
            if (g.is_escaped() || e.is_escaped()) {
                if (require_certified && g.is_escaped() && !e.is_escaped() && !e.vec.empty()) return false;
                continue;
            }
            if (!(g.vec == e.vec)) return false;
        }
        return true;
    };
    return scan(got.table()) && scan(expected.table());
}

bool op_certified_zero(const MultiOp& op) {
    for (const auto& [k, v] : op.table()) {
        (void)k;
        if (v.state == OpVal::State::set && !v.vec.empty()) return false;
    }
    return true;
}

long op_escape_count(const MultiOp& op) {
    long n = 0;
    for (const auto& [k, v] : op.table()) {
        (void)k;
        if (v.is_escaped()) ++n;
    }
    return n;
}

GradedMap multiop_to_graded(const MultiOp& op) {
    if (op.arity() != 1) throw DimensionMismatch("multiop_to_graded: arity must be 1");
    GradedMap f(op.sources()[0], op.target(), op.dh(), op.dv());
    for (Index i = 0; i < op.sources()[0]->dim(); ++i) {
        OpVal v = op.value({i});
        if (v.is_escaped())
            f.mark_escaped(i);
        else if (!v.vec.empty())
            f.set_col(i, v.vec);
    }
    return f;
}

MultiOp graded_to_multiop(const GradedMap& f) {
    MultiOp op({f.source()}, f.target(), f.dh(), f.dv());
    for (Index i = 0; i < f.source()->dim(); ++i) {
        if (f.col_state(i) == GradedMap::ColState::escaped)
            op.mark_escaped({i});
        else if (!f.col(i).empty())
            op.set_value({i}, f.col(i));
    }
    return op;
}

TensorElem apply_middle(const MultiOp& op, std::size_t r, const TensorElem& x,
                        const std::vector<ModulePtr>& factor_mods) {
    const Ring& ring = op.target()->ring();
    TensorElem out;
    out.escaped = x.escaped;
    const std::size_t j = op.arity();
    for (const auto& [key, coef] : x.terms) {
        if (key.size() < r + j) throw DimensionMismatch("apply_middle: tuple too short");
        Bidegree prefix{0, 0};
        for (std::size_t w = 0; w < r; ++w) prefix = prefix + factor_mods[w]->degree(key[w]);
        int sign = koszul_exponent(prefix, op.shift());
        TupleKey mid(key.begin() + static_cast<long>(r), key.begin() + static_cast<long>(r + j));
        OpVal v = op.value(mid);
        if (v.is_escaped()) {
            out.escaped = true;
            continue;
        }
        Scalar c = sign ? neg(ring, coef) : coef;
        for (const auto& [ti, tc] : v.vec.terms) {
            TupleKey nk;
            nk.reserve(key.size() - j + 1);
            nk.insert(nk.end(), key.begin(), key.begin() + static_cast<long>(r));
            nk.push_back(ti);
            nk.insert(nk.end(), key.begin() + static_cast<long>(r + j), key.end());
            out.add(ring, nk, mul(ring, c, tc));
        }
    }
    return out;
}

OpVal apply_full(const MultiOp& op, const TensorElem& x, const std::vector<ModulePtr>& factor_mods) {
    (void)factor_mods;
    const Ring& ring = op.target()->ring();
    if (x.escaped) return OpVal::escaped_val();
    OpVal out = OpVal::zero_val();
    for (const auto& [key, coef] : x.terms) {
        OpVal v = op.value(key);
        if (v.is_escaped()) return OpVal::escaped_val();
        out.vec.add_scaled(ring, v.vec, coef);
    }
    out.state = OpVal::State::set;
    return out;
}

namespace {

int suspension_exponent(const MultiOp& plain_op, const std::vector<ModulePtr>& plain_sources, const TupleKey& k) {
    const std::size_t j = plain_op.arity();
    int e = plain_op.dv() + static_cast<int>(j) - 1;
    for (std::size_t w = 0; w + 1 < j; ++w) {
        int tw = plain_sources[w]->degree(k[w]).t;
        e += (tw + 1) * static_cast<int>(j - 1 - w);
    }
    return e & 1;
}

}  // namespace

MultiOp suspend_op(const MultiOp& op, const std::vector<ModulePtr>& s_sources, const ModulePtr& s_target) {
    const Ring& ring = op.target()->ring();
    MultiOp out(s_sources, s_target, op.dh(), op.dv() + static_cast<int>(op.arity()) - 1);
    for (const auto& [k, v] : op.table()) {
        if (v.is_escaped()) {
            out.mark_escaped(k);
            continue;
        }
        int sign = suspension_exponent(op, op.sources(), k);
        SparseVec nv = sign ? v.vec.negated(ring) : v.vec;
        out.set_value(k, std::move(nv));
    }
    return out;
}

MultiOp unsuspend_op(const MultiOp& op, const std::vector<ModulePtr>& plain_sources, const ModulePtr& plain_target) {
    const Ring& ring = op.target()->ring();
    MultiOp out(plain_sources, plain_target, op.dh(), op.dv() - static_cast<int>(op.arity()) + 1);
    for (const auto& [k, v] : op.table()) {
        if (v.is_escaped()) {
            out.mark_escaped(k);
            continue;
        }
        int sign = suspension_exponent(out, plain_sources, k);
        SparseVec nv = sign ? v.vec.negated(ring) : v.vec;
        out.set_value(k, std::move(nv));
    }
    return out;
}

void for_each_tuple(const std::vector<ModulePtr>& mods, int s_cap, const std::function<void(const TupleKey&)>& fn) {
    TupleKey key(mods.size());
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int s_used) {
        if (pos == mods.size()) {
            fn(key);
            return;
        }
        for (Index i = 0; i < mods[pos]->dim(); ++i) {
            int s = mods[pos]->degree(i).s;
            if (s_used + s > s_cap) continue;
            key[pos] = i;
            rec(pos + 1, s_used + s);
        }
    };
    rec(0, 0);
}

}  // namespace dainf
