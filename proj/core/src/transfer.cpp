#include "dainf/transfer.hpp"

#include <algorithm>

namespace dainf {

namespace {

GradedMap resuspend(const GradedMap& f, const ModulePtr& s_src, const ModulePtr& s_tgt) {
    return multiop_to_graded(suspend_op(graded_to_multiop(f), {s_src}, s_tgt));
}

void put_val(MultiOp& op, const TupleKey& k, bool escaped, const SparseVec& v) {
    if (escaped) {
        op.mark_escaped(k);
        return;
    }
    if (v.empty()) {
        Bidegree out = op.tuple_degree(k) - op.shift();
        if (op.target()->truncated() && !op.target()->box().contains(out)) op.set_value(k, SparseVec{});
        return;
    }
    op.set_value(k, v);
}

/* complete a unimodular column c to an invertible matrix with first column c */
Mat complete_unimodular(const Ring& ring, const std::vector<Scalar>& c) {
    const std::size_t k = c.size();
    Mat A(1, k);
    for (std::size_t i = 0; i < k; ++i) A.at(0, i) = c[i];
    auto r = ring_solve(ring, A, {from_int(ring, 1)});
    if (!r) throw UnitNotSplit("unit class is not a unimodular element");
    Mat phi(k, k);
    if (ring.is_field()) {
        for (std::size_t i = 0; i < k; ++i) phi.at(i, 0) = c[i];
        /* greedy completion by standard vectors */
        std::size_t at = 1;
        for (std::size_t e = 0; e < k && at < k; ++e) {
            Mat test(k, at + 1);
            for (std::size_t col = 0; col < at; ++col)
                for (std::size_t row = 0; row < k; ++row) test.at(row, col) = phi.at(row, col);
            test.at(e, at) = from_int(ring, 1);
            if (ring_kernel(ring, test).empty()) {
                phi.at(e, at) = from_int(ring, 1);
                ++at;
            }
        }
        if (at != k) throw DainfError("internal: field completion failed");
        return phi;
    }
    /* Z and Z/n: Smith form of the retraction row gives a basis of its
     * kernel; c differs from the first column by a kernel element */
    Mat rrow(1, k);
    for (std::size_t i = 0; i < k; ++i) rrow.at(0, i) = (*r)[i];
    SmithForm s = smith_normal_form(ring, rrow);
    /* r * V = U^{-1} * [g 0 .. 0]; scale the first column so r * v0 = 1 */
    Mat V = s.V;
    Scalar g = mat_mul(ring, rrow, V).at(0, 0);
    auto ginv = inverse(ring, canon(ring, g.num, g.den));
    if (!ginv) throw UnitNotSplit("retraction row not unimodular");
    for (std::size_t i = 0; i < k; ++i) V.at(i, 0) = mul(ring, V.at(i, 0), *ginv);
    for (std::size_t i = 0; i < k; ++i) {
        phi.at(i, 0) = c[i];
        for (std::size_t j = 1; j < k; ++j) phi.at(i, j) = V.at(i, j);
    }
    return phi;
}

}  // namespace

ResolutionWitness verify_e1_resolution(const AlgebraPtr& B, const AlgebraPtr& A, const DAInfMorphism& phi) {
    if (!class_is_bidga(classify(*B))) throw NotBidga("B is not a bidga");
    if (classify(*A) != AlgebraClass::dga) throw NotBidga("A is not a dga");
    for (Index i = 0; i < A->module()->dim(); ++i)
        if (A->module()->degree(i).s != 0) throw NotBidga("A is not concentrated in horizontal degree 0");
    for (const auto& [pq, op] : phi.comps())
        if (pq != std::make_pair(0, 1) && !op.is_zero_op()) throw NotBidga("phi is not a strict bidga map");
    OpCheckReport morph = check_morphism(phi);
    if (!morph.pass()) throw NotBidga("phi is not a map of bidgas: " + morph.summary());

    ResolutionWitness w;
    w.B = B;
    w.A = A;
    w.phi = phi;
    w.vh = vertical_homology(underlying_twisted(*B)); /* throws FreenessFailure */

    TwistedMap tm;
    tm.source = underlying_twisted(*B);
    tm.target = underlying_twisted(*A);
    tm.set_comp(0, multiop_to_graded(*phi.comp(0, 1)));
    w.e2 = e2_and_equivalence(tm);
    if (!w.e2.equivalence) {
        std::string msg = "phi is not an E2-equivalence";
        for (const auto& n : w.e2.notes) msg += "; " + n;
        throw NotE2Equivalence(msg);
    }

    /* split unit: a retraction against the class of eta_B at (0,0) */
    const Ring& ring = B->ring();
    auto cls = w.vh.projection.col(B->unit());
    const auto& cell = w.vh.Hv->cell(Bidegree{0, 0});
    std::vector<Scalar> c(cell.size());
    for (const auto& [i, x] : cls.terms) c[w.vh.Hv->cell_pos(i)] = x;
    Mat crow(1, cell.size());
    for (std::size_t i = 0; i < cell.size(); ++i) crow.at(0, i) = c[i];
    auto r = ring_solve(ring, crow, {from_int(ring, 1)});
    if (!r) throw UnitNotSplit("k -> H^v_{00}(B) does not split");
    w.unit_retraction = *r;
    return w;
}

namespace {

struct Basis00 {
    ModulePtr E;           /* relabeled homology module */
    GradedMap section;     /* E -> B */
    GradedMap projection;  /* B -> E */
};

/* apply the section hints and the unit adjustment, producing the minimal
 * model's underlying module with its final labels */
Basis00 choose_basis(const ResolutionWitness& w, const TransferHints& hints) {
    const Ring& ring = w.B->ring();
    const ModulePtr& H = w.vh.Hv;
    const ModulePtr& MB = w.B->module();
    TwistedComplex underB = underlying_twisted(*w.B);
    const GradedMap& d0 = *underB.diff(0);

    struct CellChoice {
        Bidegree deg;
        std::vector<std::string> labels;
        std::vector<SparseVec> cycles; /* section columns in B */
        Mat proj_fix;                  /* left factor for the projection block */
    };
    std::vector<CellChoice> cells;
    for (const auto& [deg, cell] : H->cells()) {
        CellChoice cc;
        cc.deg = deg;
        auto hit = hints.section.find(deg);
        if (hit != hints.section.end()) {
            if (hit->second.size() != cell.size())
                throw DainfError("section hint at " + deg.str() + ": wrong number of classes");
            Mat T(cell.size(), cell.size());
            for (std::size_t j = 0; j < hit->second.size(); ++j) {
                const auto& entry = hit->second[j];
                auto img = d0.apply(entry.cycle);
                if (!img || !img->empty())
                    throw DainfError("section hint " + entry.label + " is not a d_0 cycle");
                auto cls = w.vh.projection.apply(entry.cycle);
                if (!cls) throw DainfError("section hint " + entry.label + ": projection escaped");
                for (const auto& [i, x] : cls->terms) T.at(H->cell_pos(i), j) = x;
                cc.labels.push_back(entry.label);
                cc.cycles.push_back(entry.cycle);
            }
            /* X with T X = I; the relabeled projection block is X * P */
            Mat X(cell.size(), cell.size());
            for (std::size_t col = 0; col < cell.size(); ++col) {
                std::vector<Scalar> e(cell.size());
                e[col] = from_int(ring, 1);
                auto sol = ring_solve(ring, T, e);
                if (!sol) throw DainfError("section hint at " + deg.str() + ": classes are not a basis");
                X.set_col(col, *sol);
            }
            cc.proj_fix = std::move(X);
        } else {
            for (std::size_t j = 0; j < cell.size(); ++j) {
                cc.labels.push_back(H->label(cell[j]));
                cc.cycles.push_back(w.vh.section.col(cell[j]));
            }
            cc.proj_fix = Mat::identity(cell.size());
        }
        cells.push_back(std::move(cc));
    }

    /* unit adjustment at (0,0): make one basis element the unit class with
     * eta_B as its chosen representative */
    std::string unit_label;
    for (auto& cc : cells) {
        if (!(cc.deg == Bidegree{0, 0})) continue;
        const auto& cell = H->cell(cc.deg);
        /* class coordinates of eta_B in the current (relabeled) basis */
        auto cls = w.vh.projection.col(w.B->unit());
        std::vector<Scalar> c0(cell.size());
        for (const auto& [i, x] : cls.terms) c0[H->cell_pos(i)] = x;
        std::vector<Scalar> c = mat_apply(ring, cc.proj_fix, c0);
        /* already adjusted iff the class is a standard basis vector whose
         * chosen representative is eta_B itself */
        std::size_t nnz = 0, pos = 0;
        for (std::size_t j = 0; j < c.size(); ++j)
            if (!is_zero(c[j])) {
                ++nnz;
                pos = j;
            }
        bool already = nnz == 1 && c[pos] == from_int(ring, 1) && cc.cycles[pos] == unit_vec(w.B->unit());
        if (already) {
            unit_label = cc.labels[pos];
        } else {
            Mat phi = complete_unimodular(ring, c);
            Mat phi_inv(c.size(), c.size());
            for (std::size_t col = 0; col < c.size(); ++col) {
                std::vector<Scalar> e(c.size());
                e[col] = from_int(ring, 1);
                auto sol = ring_solve(ring, phi, e);
                if (!sol) throw DainfError("internal: unit completion not invertible");
                phi_inv.set_col(col, *sol);
            }
            /* new cycles: first the unit itself, the rest via phi */
            std::vector<SparseVec> ncyc(c.size());
            std::vector<std::string> nlab(c.size());
            ncyc[0] = unit_vec(w.B->unit());
            nlab[0] = "unit@(0,0)";
            for (std::size_t j = 1; j < c.size(); ++j) {
                SparseVec acc;
                for (std::size_t i = 0; i < c.size(); ++i)
                    acc.add_scaled(ring, cc.cycles[i], phi.at(i, j));
                ncyc[j] = std::move(acc);
                nlab[j] = "adj" + std::to_string(j) + "@(0,0)";
            }
            cc.cycles = std::move(ncyc);
            cc.labels = std::move(nlab);
            cc.proj_fix = mat_mul(ring, phi_inv, cc.proj_fix);
            unit_label = cc.labels[0];
        }
        break;
    }
    if (unit_label.empty()) throw UnitNotSplit("no homology at (0,0) to host the unit");

    Basis00 out;
    BigradedModule::Builder eb(ring, MB->box(), MB->truncated());
    eb.faithful(MB->faithful_box());
    for (const auto& cc : cells)
        for (const auto& l : cc.labels) eb.add(l, cc.deg.s, cc.deg.t);
    out.E = eb.build();
    (void)unit_label;

    out.section = GradedMap(out.E, MB, 0, 0);
    out.projection = GradedMap(MB, out.E, 0, 0);
    for (const auto& cc : cells) {
        const auto& hcell = H->cell(cc.deg);
        for (std::size_t j = 0; j < cc.labels.size(); ++j)
            out.section.set_col(out.E->index_of(cc.labels[j]), cc.cycles[j]);
        /* projection block: proj_fix * (old projection block) */
        for (Index bi = 0; bi < MB->dim(); ++bi) {
            if (MB->degree(bi) != cc.deg) continue;
            const SparseVec& old = w.vh.projection.col(bi);
            std::vector<Scalar> oldv(hcell.size());
            for (const auto& [i, x] : old.terms) oldv[H->cell_pos(i)] = x;
            std::vector<Scalar> nv = mat_apply(ring, cc.proj_fix, oldv);
            SparseVec col;
            for (std::size_t jj = 0; jj < nv.size(); ++jj)
                col.add_term(ring, out.E->index_of(cc.labels[jj]), nv[jj]);
            out.projection.set_col(bi, std::move(col));
        }
    }
    /* columns of B off the homology-bearing cells project to zero */
    for (Index bi = 0; bi < MB->dim(); ++bi)
        if (out.projection.col_state(bi) == GradedMap::ColState::zero)
            out.projection.set_col(bi, SparseVec{});
    return out;
}

struct InductionCtx {
    const ResolutionWitness* w;
    std::shared_ptr<DAInfAlgebra> E;
    DAInfMorphism f;
    GradedMap ssec, sproj;   /* suspended section / projection */
    const TransferHints* hints;
    long obstruction_checks = 0;
    long escaped_entries = 0;

    std::string unit_label;
};

MultiOp compute_z_impl(const DAInfAlgebra& E, const DAInfMorphism& f, int l, int n) {
    const AlgebraPtr& B = f.target();
    const Ring& ring = B->ring();
    const ModulePtr& SE = E.smodule();
    const ModulePtr& SB = B->smodule();
    const MultiOp* b02 = B->tilde(0, 2);
    const MultiOp* b11 = B->tilde(1, 1);
    MultiOp z = MultiOp::uniform(SE, static_cast<std::size_t>(n), SB, l, 1 - l);
    std::vector<ModulePtr> mods(static_cast<std::size_t>(n), SE);
    for_each_tuple(mods, E.module()->box().s_max, [&](const TupleKey& key) {
        SparseVec acc;
        bool escaped = false;
        /* mtilde^{B,1}_{02} ftilde^2_{ln} */
        if (b02) {
            TensorElem f2 = mor_ftilde_j(f, l, 2, tuple_elem(key), static_cast<std::size_t>(n));
            OpVal val = apply_full(*b02, f2, mods);
            if (val.is_escaped())
                escaped = true;
            else
                acc.add_scaled(ring, val.vec, Scalar(1, 1));
        }
        /* mtilde^{B,1}_{11} ftilde^1_{l-1,n} */
        if (!escaped && b11 && l >= 1) {
            const MultiOp* fprev = f.tilde(l - 1, n);
            if (fprev) {
                OpVal fv = fprev->value(key);
                if (fv.is_escaped())
                    escaped = true;
                else
                    for (const auto& [lbl, cc] : fv.vec.terms) {
                        OpVal dv = b11->value({lbl});
                        if (dv.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        acc.add_scaled(ring, dv.vec, cc);
                    }
            }
        }
        /* - sum_{i+p=l, i+j>=2, j<=n} (-1)^i ftilde^1_{ij} mtilde^{E,j}_{pn} */
        for (int i = 0; i <= l && !escaped; ++i) {
            int p = l - i;
            for (int j = 1; j <= n; ++j) {
                if (i + j < 2) continue;
                const MultiOp* fij = f.tilde(i, j);
                if (!fij) continue;
                TensorElem mid = alg_mtilde_q(E, p, j, tuple_elem(key), static_cast<std::size_t>(n));
                OpVal val = apply_full(*fij, mid, mods);
                if (val.is_escaped()) {
                    escaped = true;
                    break;
                }
                acc.add_scaled(ring, val.vec, from_int(ring, (i % 2) ? 1 : -1));
            }
        }
        put_val(z, key, escaped, acc);
    });
    return z;
}

}  // namespace

MultiOp compute_z(const DAInfAlgebra& E_partial, const DAInfMorphism& f_partial, const AlgebraPtr& B, int l, int n) {
    if (f_partial.target().get() != B.get()) throw MissingPrerequisite("compute_z: morphism target is not B");
    MultiOp z = compute_z_impl(E_partial, f_partial, l, n);
    /* the obstruction must land in cycles */
    const MultiOp* b01 = B->tilde(0, 1);
    if (b01) {
        for (const auto& [k, v] : z.table()) {
            if (v.is_escaped()) continue;
            SparseVec img;
            bool esc = false;
            for (const auto& [lbl, c] : v.vec.terms) {
                OpVal dv = b01->value({lbl});
                if (dv.is_escaped()) {
                    esc = true;
                    break;
                }
                img.add_scaled(B->ring(), dv.vec, c);
            }
            if (!esc && !img.empty())
                throw DainfError("obstruction cocycle identity failed at (l,n)=(" + std::to_string(l) + "," +
                                 std::to_string(n) + ")");
        }
    }
    return z;
}

TransferResult transfer_minimal(const ResolutionWitness& w, const TransferHints& hints) {
    const Ring& ring = w.B->ring();
    Basis00 basis = choose_basis(w, hints);
    const ModulePtr& ME = basis.E;
    const ModulePtr& MB = w.B->module();

    /* locate the unit label: the basis element whose section is eta_B */
    std::string unit_label;
    for (Index i = 0; i < ME->dim(); ++i)
        if (ME->degree(i) == Bidegree{0, 0} && basis.section.col(i) == unit_vec(w.B->unit())) {
            unit_label = ME->label(i);
            break;
        }
    if (unit_label.empty()) throw UnitNotSplit("no unit representative in the chosen basis");

    Truncation tr = w.B->truncation();
    auto E = std::make_shared<DAInfAlgebra>(ME, unit_label, tr);
    DAInfMorphism f(E, w.B);
    f.set_comp(0, 1, graded_to_multiop(basis.section));

    const ModulePtr& SE = E->smodule();
    const ModulePtr& SB = w.B->smodule();
    GradedMap ssec = resuspend(basis.section, SE, SB);
    GradedMap sproj = resuspend(basis.projection, SB, SE);
    const MultiOp* b01 = w.B->tilde(0, 1);

    TransferResult result;
    result.section = basis.section;
    result.projection = basis.projection;

    const int bound = tr.transfer_bound;
    const int J = tr.arity_max;
    for (int wgt = 2; wgt <= bound; ++wgt) {
        for (int l = 0; l <= wgt - 1; ++l) {
            int n = wgt - l;
            if (n < 1 || n > J) continue;
            MultiOp z = compute_z_impl(*E, f, l, n);

            /* cocycle assertion (the obstruction lemma) */
            for (const auto& [k, v] : z.table()) {
                if (v.is_escaped()) continue;
                SparseVec img;
                bool esc = false;
                if (b01)
                    for (const auto& [lbl, c] : v.vec.terms) {
                        OpVal dv = b01->value({lbl});
                        if (dv.is_escaped()) {
                            esc = true;
                            break;
                        }
                        img.add_scaled(ring, dv.vec, c);
                    }
                if (!esc) {
                    result.obstruction_checks += 1;
                    if (!img.empty())
                        throw DainfError("obstruction cocycle identity failed at (l,n)=(" + std::to_string(l) +
                                         "," + std::to_string(n) + ")");
                }
            }

            /* mtilde^{E,1}_{ln} := projection of z */
            MultiOp mt = MultiOp::uniform(SE, static_cast<std::size_t>(n), SE, l, 1 - l);
            MultiOp ft = MultiOp::uniform(SE, static_cast<std::size_t>(n), SB, l, -l);
            std::vector<ModulePtr> mods(static_cast<std::size_t>(n), SE);
            auto hint_map_it = hints.lifts.find({l, n});

            for_each_tuple(mods, ME->box().s_max, [&](const TupleKey& key) {
                OpVal zv = z.value(key);
                if (zv.is_escaped()) {
                    result.escaped_entries += 1;
                    mt.mark_escaped(key);
                    ft.mark_escaped(key);
                    return;
                }
                auto mval = sproj.apply(zv.vec);
                if (!mval) {
                    result.escaped_entries += 1;
                    mt.mark_escaped(key);
                    ft.mark_escaped(key);
                    return;
                }
                bool has_unit = std::find(key.begin(), key.end(), E->unit()) != key.end();
                if (has_unit && l + n >= 3 && !mval->empty())
                    throw DainfError("transferred operation violates the unit condition at (l,n)=(" +
                                     std::to_string(l) + "," + std::to_string(n) + ")");
                put_val(mt, key, false, *mval);

                /* rhs = ftilde_{01} mtilde_{ln} - z */
                auto lifted = ssec.apply(*mval);
                if (!lifted) {
                    result.escaped_entries += 1;
                    ft.mark_escaped(key);
                    return;
                }
                SparseVec rhs = *lifted;
                rhs.add_scaled(ring, zv.vec, from_int(ring, -1));

                if (has_unit) {
                    if (!rhs.empty())
                        throw DainfError("unit lift is obstructed at (l,n)=(" + std::to_string(l) + "," +
                                         std::to_string(n) + ")");
                    put_val(ft, key, false, SparseVec{}); /* ftilde zero on unit tuples */
                    return;
                }

                /* hint lookup by labels */
                if (hint_map_it != hints.lifts.end()) {
                    std::vector<std::string> labs;
                    for (Index idx : key) labs.push_back(SE->label(idx));
                    auto hv = hint_map_it->second.find(labs);
                    if (hv != hint_map_it->second.end()) {
                        /* hinted unsuspended value: suspend the single entry */
                        MultiOp hop = MultiOp::uniform(ME, static_cast<std::size_t>(n), MB, l, 1 - l - n);
                        if (!hv->second.empty()) hop.set_value(key, hv->second);
                        MultiOp hsus = suspend_op(hop, std::vector<ModulePtr>(static_cast<std::size_t>(n), SE), SB);
                        OpVal y = hsus.value(key);
                        /* validate: mtilde_{01} y = rhs */
                        SparseVec img;
                        if (b01)
                            for (const auto& [lbl, c] : y.vec.terms) {
                                OpVal dv = b01->value({lbl});
                                if (dv.is_escaped()) throw DainfError("hint validation escaped");
                                img.add_scaled(ring, dv.vec, c);
                            }
                        img.add_scaled(ring, rhs, from_int(ring, -1));
                        if (!img.empty())
                            throw DainfError("lift hint at (l,n)=(" + std::to_string(l) + "," + std::to_string(n) +
                                             ") does not satisfy the lift equation");
                        put_val(ft, key, false, y.vec);
                        return;
                    }
                }

                if (rhs.empty()) {
                    put_val(ft, key, false, SparseVec{}); /* canonical zero lift */
                    return;
                }

                /* solve mtilde^{B,1}_{01} y = rhs against the block at the
                 * source cell of the suspended differential */
                Bidegree ydeg = mt.tuple_degree(key) - Bidegree{l, -l};
                const auto& cell = SB->cell(ydeg);
                Mat blk(SB->cell(ydeg - Bidegree{0, 1}).size(), cell.size());
                for (std::size_t cidx = 0; cidx < cell.size(); ++cidx) {
                    OpVal dv = b01 ? b01->value({cell[cidx]}) : OpVal::zero_val();
                    if (dv.is_escaped()) {
                        result.escaped_entries += 1;
                        ft.mark_escaped(key);
                        return;
                    }
                    for (const auto& [r2, x] : dv.vec.terms) blk.at(SB->cell_pos(r2), cidx) = x;
                }
                std::vector<Scalar> rhsv(SB->cell(ydeg - Bidegree{0, 1}).size());
                for (const auto& [i, x] : rhs.terms) rhsv[SB->cell_pos(i)] = x;
                auto sol = ring_solve(ring, blk, rhsv);
                if (!sol)
                    throw DainfError("internal inconsistency: lift unsolvable at (l,n)=(" + std::to_string(l) +
                                     "," + std::to_string(n) + ")");
                SparseVec y;
                for (std::size_t cidx = 0; cidx < cell.size(); ++cidx) y.add_term(ring, cell[cidx], (*sol)[cidx]);
                put_val(ft, key, false, y);
            });

            if (!mt.is_zero_op() || !mt.table().empty())
                E->set_op(l, n, unsuspend_op(mt, std::vector<ModulePtr>(static_cast<std::size_t>(n), ME), ME));
            if (!ft.is_zero_op() || !ft.table().empty())
                f.set_comp(l, n, unsuspend_op(ft, std::vector<ModulePtr>(static_cast<std::size_t>(n), ME), MB));
        }
    }

    result.E = E;
    result.f = std::move(f);
    return result;
}

CompareResult compare_minimal(const DAInfMorphism& alpha, const TransferResult& ef, const TransferResult& fg) {
    const AlgebraPtr& E = ef.E;
    const AlgebraPtr& F = fg.E;
    const AlgebraPtr& B = ef.f.target();
    const AlgebraPtr& C = fg.f.target();
    if (alpha.source().get() != B.get() || alpha.target().get() != C.get())
        throw MissingPrerequisite("compare_minimal: alpha must map B to C");
    for (const auto& [pq, op] : alpha.comps())
        if (pq != std::make_pair(0, 1) && !op.is_zero_op())
            throw MissingPrerequisite("compare_minimal: alpha must be strict");
    const Ring& ring = B->ring();
    const ModulePtr& SE = E->smodule();
    const ModulePtr& SC = C->smodule();

    const MultiOp* c01 = C->tilde(0, 1);
    const MultiOp* c11 = C->tilde(1, 1);
    const MultiOp* alpha01 = alpha.tilde(0, 1);
    GradedMap sprojF = resuspend(fg.projection, SC, F->smodule());
    GradedMap ssecF = resuspend(fg.section, F->smodule(), SC);

    CompareResult out;
    out.beta = DAInfMorphism(E, F);
    std::map<std::pair<int, int>, MultiOp> hcomps;

    auto apply_c01 = [&](const SparseVec& v) -> std::optional<SparseVec> {
        SparseVec img;
        if (!c01) return img;
        for (const auto& [lbl, c] : v.terms) {
            OpVal dv = c01->value({lbl});
            if (dv.is_escaped()) return std::nullopt;
            img.add_scaled(ring, dv.vec, c);
        }
        return img;
    };

    /* (alpha f)^1_{p,q} on a tuple: alpha_{01} after ftilde^1_{p,q} */
    auto alphaf1 = [&](int p, const TupleKey& key) -> std::optional<SparseVec> {
        const MultiOp* ft = ef.f.tilde(p, static_cast<int>(key.size()));
        if (!ft || !alpha01) return SparseVec{};
        OpVal fv = ft->value(key);
        if (fv.is_escaped()) return std::nullopt;
        SparseVec img;
        for (const auto& [lbl, c] : fv.vec.terms) {
            OpVal av = alpha01->value({lbl});
            if (av.is_escaped()) return std::nullopt;
            img.add_scaled(ring, av.vec, c);
        }
        return img;
    };

    /* (g beta)^1_{i,j} on a tuple, using the partial beta */
    auto gbeta1 = [&](int i, const TupleKey& key) -> std::optional<SparseVec> {
        SparseVec acc;
        std::vector<ModulePtr> mods(key.size(), SE);
        for (int a = 0; a <= i; ++a) {
            int pp = i - a;
            for (std::size_t q = 1; q <= key.size(); ++q) {
                const MultiOp* gq = fg.f.tilde(a, static_cast<int>(q));
                if (!gq) continue;
                TensorElem mid = mor_ftilde_j(out.beta, pp, q, tuple_elem(key), key.size());
                OpVal val = apply_full(*gq, mid, mods);
                if (val.is_escaped()) return std::nullopt;
                acc.add_scaled(ring, val.vec, Scalar(1, 1));
            }
        }
        return acc;
    };

    const MultiOp* muC = C->tilde(0, 2);
    const int bound = E->truncation().transfer_bound;
    const int J = E->truncation().arity_max;

    for (int wgt = 1; wgt <= bound; ++wgt) {
        for (int l = 0; l <= wgt - 1; ++l) {
            int n = wgt - l;
            if (n < 1 || n > J) continue;
            MultiOp bt = MultiOp::uniform(SE, static_cast<std::size_t>(n), F->smodule(), l, -l);
            MultiOp ht = MultiOp::uniform(SE, static_cast<std::size_t>(n), SC, l, -1 - l);
            std::vector<ModulePtr> mods(static_cast<std::size_t>(n), SE);
            for_each_tuple(mods, E->module()->box().s_max, [&](const TupleKey& key) {
                SparseVec y;
                bool escaped = false;
                /* t1: mtilde^{C,1}_{11} htilde_{l-1,n} */
                if (c11 && l >= 1) {
                    auto it = hcomps.find({l - 1, n});
                    if (it != hcomps.end()) {
                        OpVal hv = it->second.value(key);
                        if (hv.is_escaped())
                            escaped = true;
                        else
                            for (const auto& [lbl, c] : hv.vec.terms) {
                                OpVal dv = c11->value({lbl});
                                if (dv.is_escaped()) {
                                    escaped = true;
                                    break;
                                }
                                y.add_scaled(ring, dv.vec, c);
                            }
                    }
                }
                /* t2: (-1)^l (alpha f)_{ln} */
                if (!escaped) {
                    auto v = alphaf1(l, key);
                    if (!v)
                        escaped = true;
                    else
                        y.add_scaled(ring, *v, from_int(ring, (l % 2) ? -1 : 1));
                }
                /* t3: -(-1)^l sum_{i+j>=2} gtilde_{ij} beta^j */
                for (int i = 0; i <= l && !escaped; ++i) {
                    int p = l - i;
                    for (int j = 1; j <= n; ++j) {
                        if (i + j < 2) continue;
                        const MultiOp* gij = fg.f.tilde(i, j);
                        if (!gij) continue;
                        TensorElem mid = mor_ftilde_j(out.beta, p, static_cast<std::size_t>(j), tuple_elem(key),
                                                      static_cast<std::size_t>(n));
                        OpVal val = apply_full(*gij, mid, mods);
                        if (val.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        y.add_scaled(ring, val.vec, from_int(ring, (l % 2) ? 1 : -1));
                    }
                }
                /* t4: (-1)^l sum htilde_{ij} mtilde^{E,j}_{pn} */
                for (int i = 0; i <= l && !escaped; ++i) {
                    int p = l - i;
                    for (int j = 1; j <= n; ++j) {
                        auto it = hcomps.find({i, j});
                        if (it == hcomps.end()) continue;
                        TensorElem mid = alg_mtilde_q(*E, p, j, tuple_elem(key), static_cast<std::size_t>(n));
                        OpVal val = apply_full(it->second, mid, mods);
                        if (val.is_escaped()) {
                            escaped = true;
                            break;
                        }
                        y.add_scaled(ring, val.vec, from_int(ring, (l % 2) ? -1 : 1));
                    }
                }
                /* t5 + t6: mu-pairings */
                for (int i = 0; i <= l && !escaped && muC; ++i) {
                    int p = l - i;
                    for (int j = 1; j < n; ++j) {
                        int q = n - j;
                        TupleKey head(key.begin(), key.begin() + j);
                        TupleKey tail(key.begin() + j, key.end());
                        Bidegree hd{0, 0};
                        for (Index hi : head) hd = hd + SE->degree(hi);
                        /* t5: mu( (g beta)_{ij} (x) htilde_{pq} ) */
                        auto ith = hcomps.find({p, q});
                        if (ith != hcomps.end()) {
                            auto av = gbeta1(i, head);
                            if (!av) {
                                escaped = true;
                                break;
                            }
                            OpVal bv = ith->second.value(tail);
                            if (bv.is_escaped()) {
                                escaped = true;
                                break;
                            }
                            int ks = koszul_exponent(hd, Bidegree{p, -1 - p});
                            for (const auto& [la, ca] : av->terms)
                                for (const auto& [lb, cb] : bv.vec.terms) {
                                    OpVal mv = muC->value({la, lb});
                                    if (mv.is_escaped()) {
                                        escaped = true;
                                        break;
                                    }
                                    Scalar c = mul(ring, ca, cb);
                                    if (ks) c = neg(ring, c);
                                    y.add_scaled(ring, mv.vec, c);
                                }
                        }
                        if (escaped) break;
                        /* t6: (-1)^p mu( htilde_{ij} (x) (alpha f)_{pq} ) */
                        auto ith2 = hcomps.find({i, j});
                        if (ith2 != hcomps.end()) {
                            OpVal av = ith2->second.value(head);
                            if (av.is_escaped()) {
                                escaped = true;
                                break;
                            }
                            auto bv = alphaf1(p, tail);
                            if (!bv) {
                                escaped = true;
                                break;
                            }
                            int ks = koszul_exponent(hd, Bidegree{p, -p}) ^ (p & 1);
                            for (const auto& [la, ca] : av.vec.terms)
                                for (const auto& [lb, cb] : bv->terms) {
                                    OpVal mv = muC->value({la, lb});
                                    if (mv.is_escaped()) {
                                        escaped = true;
                                        break;
                                    }
                                    Scalar c = mul(ring, ca, cb);
                                    if (ks) c = neg(ring, c);
                                    y.add_scaled(ring, mv.vec, c);
                                }
                        }
                        if (escaped) break;
                    }
                }
                if (escaped) {
                    bt.mark_escaped(key);
                    ht.mark_escaped(key);
                    return;
                }
                /* cocycle assertion */
                auto img = apply_c01(y);
                if (!img) {
                    bt.mark_escaped(key);
                    ht.mark_escaped(key);
                    return;
                }
                if (!img->empty())
                    throw DainfError("comparison obstruction identity failed at (l,n)=(" + std::to_string(l) +
                                     "," + std::to_string(n) + ")");
                out.obstruction_checks += 1;

                /* beta_{ln} := (-1)^l proj_F(y) */
                auto bval = sprojF.apply(y);
                if (!bval) {
                    bt.mark_escaped(key);
                    ht.mark_escaped(key);
                    return;
                }
                if (l % 2) *bval = bval->negated(ring);
                put_val(bt, key, false, *bval);

                /* solve mtilde^{C,1}_{01} h = (-1)^l gtilde_{01} beta - y */
                auto lifted = ssecF.apply(*bval);
                if (!lifted) {
                    ht.mark_escaped(key);
                    return;
                }
                SparseVec rhs = *lifted;
                if (l % 2) rhs = rhs.negated(ring);
                rhs.add_scaled(ring, y, from_int(ring, -1));
                bool has_unit = std::find(key.begin(), key.end(), E->unit()) != key.end();
                if (has_unit) {
                    if (!rhs.empty())
                        throw DainfError("homotopy unit lift obstructed at (l,n)=(" + std::to_string(l) + "," +
                                         std::to_string(n) + ")");
                    put_val(ht, key, false, SparseVec{});
                    return;
                }
                if (rhs.empty()) {
                    put_val(ht, key, false, SparseVec{});
                    return;
                }
                Bidegree ydeg = bt.tuple_degree(key) - Bidegree{l, -1 - l};
                const auto& cell = SC->cell(ydeg);
                Mat blk(SC->cell(ydeg - Bidegree{0, 1}).size(), cell.size());
                for (std::size_t cidx = 0; cidx < cell.size(); ++cidx) {
                    OpVal dv = c01 ? c01->value({cell[cidx]}) : OpVal::zero_val();
                    if (dv.is_escaped()) {
                        ht.mark_escaped(key);
                        return;
                    }
                    for (const auto& [r2, x] : dv.vec.terms) blk.at(SC->cell_pos(r2), cidx) = x;
                }
                std::vector<Scalar> rhsv(SC->cell(ydeg - Bidegree{0, 1}).size());
                for (const auto& [i2, x] : rhs.terms) rhsv[SC->cell_pos(i2)] = x;
                auto sol = ring_solve(ring, blk, rhsv);
                if (!sol)
                    throw DainfError("comparison homotopy lift unsolvable at (l,n)=(" + std::to_string(l) + "," +
                                     std::to_string(n) + ")");
                SparseVec hval;
                for (std::size_t cidx = 0; cidx < cell.size(); ++cidx) hval.add_term(ring, cell[cidx], (*sol)[cidx]);
                put_val(ht, key, false, hval);
            });
            if (!bt.is_zero_op() || !bt.table().empty())
                out.beta.set_comp(l, n, unsuspend_op(bt, std::vector<ModulePtr>(static_cast<std::size_t>(n),
                                                                                E->module()),
                                                     F->module()));
            hcomps.emplace(std::make_pair(l, n), std::move(ht));
        }
    }

    DAInfMorphism gb = compose_morphisms(fg.f, out.beta);
    DAInfMorphism af = compose_morphisms(alpha, ef.f);
    DAInfHomotopy h(std::move(gb), std::move(af));
    for (auto& [ln, op] : hcomps)
        if (!op.is_zero_op() || !op.table().empty()) h.set_comp(ln.first, ln.second, std::move(op));
    out.h = std::move(h);
    return out;
}

TransferHints extract_hints(const TransferResult& r) {
    TransferHints h;
    const ModulePtr& ME = r.E->module();
    for (const auto& [deg, cell] : ME->cells()) {
        for (Index i : cell) h.section[deg].push_back({ME->label(i), r.section.col(i)});
    }
    for (const auto& [pq, op] : r.f.comps()) {
        if (pq == std::make_pair(0, 1)) continue;
        auto& m = h.lifts[pq];
        for (const auto& [k, v] : op.table()) {
            if (v.is_escaped()) continue;
            std::vector<std::string> labs;
            for (Index idx : k) labs.push_back(ME->label(idx));
            m[labs] = v.vec;
        }
    }
    return h;
}

}  // namespace dainf
