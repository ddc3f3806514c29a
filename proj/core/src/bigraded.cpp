#include "dainf/bigraded.hpp"

#include <algorithm>

namespace dainf {

BigradedModule::Builder& BigradedModule::Builder::add(const std::string& label, int s, int t) {
    if (s < 0) throw DainfError("horizontal degree must be >= 0: " + label);
    if (!box_.contains({s, t}))
        throw DainfError("basis element outside support box: " + label + " at (" + std::to_string(s) + "," +
                         std::to_string(t) + ")");
    elems_.push_back({label, {s, t}});
    return *this;
}

ModulePtr BigradedModule::Builder::build() {
    auto mod = std::make_shared<BigradedModule>();
    mod->ring_ = ring_;
    mod->box_ = box_;
    mod->faithful_ = faithful_;
    mod->truncated_ = truncated_;
    std::sort(elems_.begin(), elems_.end(), [](const BasisElem& a, const BasisElem& b) {
        if (a.deg != b.deg) return a.deg < b.deg;
        return a.label < b.label;
    });
    mod->elems_ = std::move(elems_);
    mod->cell_pos_.resize(mod->elems_.size());
    for (Index i = 0; i < mod->elems_.size(); ++i) {
        const auto& e = mod->elems_[i];
        if (mod->by_label_.count(e.label)) throw DainfError("duplicate basis label: " + e.label);
        mod->by_label_[e.label] = i;
        auto& cell = mod->cells_[e.deg];
        mod->cell_pos_[i] = cell.size();
        cell.push_back(i);
    }
    return mod;
}

const std::vector<BigradedModule::Index>& BigradedModule::cell(const Bidegree& d) const {
    static const std::vector<Index> empty;
    auto it = cells_.find(d);
    return it == cells_.end() ? empty : it->second;
}

BigradedModule::Index BigradedModule::index_of(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) throw DainfError("unknown basis label: " + label);
    return it->second;
}

ModulePtr BigradedModule::suspended() const {
    auto mod = std::make_shared<BigradedModule>();
    mod->ring_ = ring_;
    mod->box_ = SupportBox{box_.s_max, box_.t_min + 1, box_.t_max + 1};
    mod->faithful_ = SupportBox{faithful_.s_max, faithful_.t_min + 1, faithful_.t_max + 1};
    mod->truncated_ = truncated_;
    mod->elems_ = elems_;
    for (auto& e : mod->elems_) e.deg.t += 1;
    mod->cell_pos_.resize(mod->elems_.size());
    for (Index i = 0; i < mod->elems_.size(); ++i) {
        mod->by_label_[mod->elems_[i].label] = i;
        auto& cell = mod->cells_[mod->elems_[i].deg];
        mod->cell_pos_[i] = cell.size();
        cell.push_back(i);
    }
    return mod;
}

bool BigradedModule::same_basis(const BigradedModule& a, const BigradedModule& b) {
    if (a.ring_ != b.ring_ || a.elems_.size() != b.elems_.size()) return false;
    for (Index i = 0; i < a.elems_.size(); ++i)
        if (a.elems_[i].label != b.elems_[i].label || a.elems_[i].deg != b.elems_[i].deg) return false;
    return true;
}

void SparseVec::add_term(const Ring& ring, BigradedModule::Index i, const Scalar& c) {
    if (is_zero(c)) return;
    auto it = std::lower_bound(terms.begin(), terms.end(), i,
                               [](const auto& p, BigradedModule::Index j) { return p.first < j; });
    if (it != terms.end() && it->first == i) {
        it->second = add(ring, it->second, c);
        if (is_zero(it->second)) terms.erase(it);
    } else {
        terms.insert(it, {i, c});
    }
}

void SparseVec::add_scaled(const Ring& ring, const SparseVec& other, const Scalar& c) {
    if (is_zero(c)) return;
    for (const auto& [i, x] : other.terms) add_term(ring, i, mul(ring, c, x));
}

SparseVec SparseVec::negated(const Ring& ring) const {
    SparseVec out;
    out.terms.reserve(terms.size());
    for (const auto& [i, x] : terms) out.terms.push_back({i, neg(ring, x)});
    return out;
}

std::string SparseVec::str(const BigradedModule& mod) const {
    if (terms.empty()) return "0";
    std::string s;
    for (const auto& [i, c] : terms) {
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*" + mod.label(i);
    }
    return s;
}

SparseVec unit_vec(BigradedModule::Index i) {
    SparseVec v;
    v.terms.push_back({i, Scalar(1, 1)});
    return v;
}

ModulePtr tensor_modules(const ModulePtr& m, const ModulePtr& n, const SupportBox& box) {
    if (m->ring() != n->ring()) throw DainfError("tensor_modules: rings disagree");
    bool clipped = false;
    std::vector<std::pair<std::string, Bidegree>> labels;
    for (BigradedModule::Index i = 0; i < m->dim(); ++i)
        for (BigradedModule::Index j = 0; j < n->dim(); ++j) {
            Bidegree d = m->degree(i) + n->degree(j);
            if (!box.contains(d)) {
                clipped = true;
                continue;
            }
            labels.push_back({"(" + m->label(i) + "|" + n->label(j) + ")", d});
        }
    BigradedModule::Builder b(m->ring(), box, clipped || m->truncated() || n->truncated());
    for (const auto& [lab, d] : labels) b.add(lab, d.s, d.t);
    return b.build();
}

GradedMap::GradedMap(ModulePtr source, ModulePtr target, int dh, int dv)
    : source_(std::move(source)), target_(std::move(target)), dh_(dh), dv_(dv) {
    cols_.resize(source_->dim());
    state_.assign(source_->dim(), ColState::zero);
}

GradedMap GradedMap::identity(const ModulePtr& m) {
    GradedMap f(m, m, 0, 0);
    for (BigradedModule::Index i = 0; i < m->dim(); ++i) f.set_col(i, unit_vec(i));
    return f;
}

void GradedMap::set_col(BigradedModule::Index i, SparseVec v) {
    Bidegree want = source_->degree(i) - shift();
    for (const auto& [j, c] : v.terms) {
        (void)c;
        if (target_->degree(j) != want)
            throw DainfError("graded map column lands off-degree: " + source_->label(i) + " -> " +
                             target_->label(j));
    }
    cols_[i] = std::move(v);
    state_[i] = ColState::set;
}

void GradedMap::mark_escaped(BigradedModule::Index i) {
    cols_[i] = SparseVec{};
    state_[i] = ColState::escaped;
}

bool GradedMap::any_escaped() const {
    for (auto s : state_)
        if (s == ColState::escaped) return true;
    return false;
}

std::optional<SparseVec> GradedMap::apply(const SparseVec& v) const {
    const Ring& ring = source_->ring();
    SparseVec out;
    for (const auto& [i, c] : v.terms) {
        if (state_[i] == ColState::escaped) return std::nullopt;
        out.add_scaled(ring, cols_[i], c);
    }
    return out;
}

std::optional<Mat> GradedMap::block_at(const Bidegree& d) const {
    const auto& src = source_->cell(d);
    const auto& tgt = target_->cell(d - shift());
    Mat m(tgt.size(), src.size());
    for (std::size_t c = 0; c < src.size(); ++c) {
        BigradedModule::Index i = src[c];
        if (state_[i] == ColState::escaped) return std::nullopt;
        for (const auto& [j, x] : cols_[i].terms) m.at(target_->cell_pos(j), c) = x;
    }
    return m;
}

bool GradedMap::is_zero_map() const {
    for (BigradedModule::Index i = 0; i < source_->dim(); ++i)
        if (state_[i] == ColState::escaped || !cols_[i].empty()) return false;
    return true;
}

bool GradedMap::equal_to(const GradedMap& o) const {
    if (dh_ != o.dh_ || dv_ != o.dv_ || source_->dim() != o.source_->dim()) return false;
    for (BigradedModule::Index i = 0; i < source_->dim(); ++i) {
        bool esc_a = state_[i] == ColState::escaped, esc_b = o.state_[i] == ColState::escaped;
        if (esc_a != esc_b) return false;
        if (!esc_a && !(cols_[i] == o.cols_[i])) return false;
    }
    return true;
}

GradedMap GradedMap::negated() const {
    GradedMap out(source_, target_, dh_, dv_);
    for (BigradedModule::Index i = 0; i < source_->dim(); ++i) {
        if (state_[i] == ColState::escaped)
            out.mark_escaped(i);
        else if (state_[i] == ColState::set)
            out.set_col(i, cols_[i].negated(source_->ring()));
    }
    return out;
}

GradedMap GradedMap::plus(const GradedMap& o) const {
    if (dh_ != o.dh_ || dv_ != o.dv_) throw DimensionMismatch("GradedMap::plus: shifts disagree");
    GradedMap out(source_, target_, dh_, dv_);
    const Ring& ring = source_->ring();
    for (BigradedModule::Index i = 0; i < source_->dim(); ++i) {
        if (state_[i] == ColState::escaped || o.state_[i] == ColState::escaped) {
            out.mark_escaped(i);
            continue;
        }
        SparseVec v = cols_[i];
        v.add_scaled(ring, o.cols_[i], Scalar(1, 1));
        out.set_col(i, std::move(v));
    }
    return out;
}

GradedMap GradedMap::scaled(const Scalar& c) const {
    GradedMap out(source_, target_, dh_, dv_);
    const Ring& ring = source_->ring();
    for (BigradedModule::Index i = 0; i < source_->dim(); ++i) {
        if (state_[i] == ColState::escaped) {
            out.mark_escaped(i);
            continue;
        }
        SparseVec v;
        v.add_scaled(ring, cols_[i], c);
        out.set_col(i, std::move(v));
    }
    return out;
}

GradedMap compose_graded_maps(const GradedMap& g, const GradedMap& f) {
    if (f.target().get() != g.source().get() && !BigradedModule::same_basis(*f.target(), *g.source()))
        throw DimensionMismatch("compose_graded_maps: middle modules disagree");
    GradedMap out(f.source(), g.target(), f.dh() + g.dh(), f.dv() + g.dv());
    for (BigradedModule::Index i = 0; i < f.source()->dim(); ++i) {
        if (f.col_state(i) == GradedMap::ColState::escaped) {
            out.mark_escaped(i);
            continue;
        }
        auto v = g.apply(f.col(i));
        if (!v)
            out.mark_escaped(i);
        else
            out.set_col(i, std::move(*v));
    }
    return out;
}

GradedMap tensor_graded_maps(const GradedMap& f, const GradedMap& g, const ModulePtr& source_tensor,
                             const ModulePtr& target_tensor) {
    const Ring& ring = f.source()->ring();
    GradedMap out(source_tensor, target_tensor, f.dh() + g.dh(), f.dv() + g.dv());
    for (BigradedModule::Index i = 0; i < source_tensor->dim(); ++i) {
        const std::string& lbl = source_tensor->label(i);
        /* labels are "(a|b)" produced by tensor_modules */
        int depth = 0;
        std::size_t split = 0;
        for (std::size_t k = 0; k < lbl.size(); ++k) {
            if (lbl[k] == '(') ++depth;
            if (lbl[k] == ')') --depth;
            if (lbl[k] == '|' && depth == 1) {
                split = k;
                break;
            }
        }
        std::string la = lbl.substr(1, split - 1);
        std::string lb = lbl.substr(split + 1, lbl.size() - split - 2);
        BigradedModule::Index ia = f.source()->index_of(la);
        BigradedModule::Index ib = g.source()->index_of(lb);
        if (f.col_state(ia) == GradedMap::ColState::escaped || g.col_state(ib) == GradedMap::ColState::escaped) {
            out.mark_escaped(i);
            continue;
        }
        int sign = koszul_exponent(f.source()->degree(ia), g.shift());
        SparseVec v;
        bool escaped = false;
        for (const auto& [ja, ca] : f.col(ia).terms) {
            for (const auto& [jb, cb] : g.col(ib).terms) {
                std::string lab = "(" + f.target()->label(ja) + "|" + g.target()->label(jb) + ")";
                if (!target_tensor->has_label(lab)) {
                    if (target_tensor->truncated()) {
                        escaped = true;
                        break;
                    }
                    throw DainfError("tensor_graded_maps: missing product label " + lab);
                }
                Scalar c = mul(ring, ca, cb);
                if (sign) c = neg(ring, c);
                v.add_term(ring, target_tensor->index_of(lab), c);
            }
            if (escaped) break;
        }
        if (escaped)
            out.mark_escaped(i);
        else
            out.set_col(i, std::move(v));
    }
    return out;
}

FreeHomology free_homology(const GradedMap& d_in, const GradedMap& d_out) {
    const ModulePtr& M = d_out.source();
    const Ring& ring = M->ring();
    if (d_in.target().get() != M.get() && !BigradedModule::same_basis(*d_in.target(), *M))
        throw DimensionMismatch("free_homology: d_in target and d_out source disagree");

    struct CellData {
        Bidegree deg;
        CellHomology h;
        std::vector<BigradedModule::Index> amb;
    };
    std::vector<CellData> data;
    for (const auto& [deg, amb] : M->cells()) {
        Bidegree in_deg = deg + d_in.shift();
        const auto& in_cell = d_in.source()->cell(in_deg);
        Mat din(amb.size(), in_cell.size());
        for (std::size_t c = 0; c < in_cell.size(); ++c) {
            auto i = in_cell[c];
            if (d_in.col_state(i) == GradedMap::ColState::escaped)
                throw TruncationEscape("free_homology: escaped d_in column at " + in_deg.str());
            for (const auto& [j, x] : d_in.col(i).terms) din.at(M->cell_pos(j), c) = x;
        }
        auto dout = d_out.block_at(deg);
        if (!dout) throw TruncationEscape("free_homology: escaped d_out column at " + deg.str());
        CellHomology h;
        try {
            h = cell_homology(ring, din, *dout);
        } catch (const FreenessFailure& f) {
            throw FreenessFailure("homology not free at " + deg.str() + ": " + f.what(), f.divisors);
        } catch (const NotAComplex& e) {
            throw NotAComplex("not a complex at " + deg.str() + ": " + e.what());
        }
        if (h.rank > 0) data.push_back({deg, std::move(h), amb});
    }

    BigradedModule::Builder b(ring, M->box(), M->truncated());
    b.faithful(M->faithful_box());
    for (const auto& cd : data)
        for (long k = 0; k < cd.h.rank; ++k) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "h%02ld@(%d,%d)", k, cd.deg.s, cd.deg.t);
            b.add(buf, cd.deg.s, cd.deg.t);
        }
    ModulePtr H = b.build();

    GradedMap section(H, M, 0, 0);
    GradedMap projection(M, H, 0, 0);
    for (const auto& cd : data) {
        const auto& hcell = H->cell(cd.deg);
        for (long k = 0; k < cd.h.rank; ++k) {
            SparseVec v;
            for (std::size_t r = 0; r < cd.amb.size(); ++r)
                v.add_term(ring, cd.amb[r], cd.h.section.at(r, static_cast<std::size_t>(k)));
            section.set_col(hcell[static_cast<std::size_t>(k)], std::move(v));
        }
        for (std::size_t r = 0; r < cd.amb.size(); ++r) {
            SparseVec v;
            for (long k = 0; k < cd.h.rank; ++k)
                v.add_term(ring, hcell[static_cast<std::size_t>(k)],
                           cd.h.projection.at(static_cast<std::size_t>(k), r));
            projection.set_col(cd.amb[r], std::move(v));
        }
    }
    return FreeHomology{H, std::move(section), std::move(projection)};
}

}  // namespace dainf
