#pragma once

#include "dainf/algebra.hpp"

#include <random>

namespace dainf_test {

using namespace dainf;

/* A throwaway generator of small dA-infinity-shaped structures for the
 * meta-suites: some vectors are genuine dgas (trivial products, square-zero
 * single-entry differentials, unit-preserving conjugates), the rest arbitrary
 * degree-correct tables. */
struct StructureGen {
    std::mt19937_64 rng;
    explicit StructureGen(std::uint64_t seed) : rng(seed) {}

    Ring random_ring() {
        switch (rng() % 4) {
            case 0: return Ring::integers();
            case 1: return Ring::prime_field(2);
            case 2: return Ring::integers_mod(4);
            default: return Ring::integers_mod(9);
        }
    }

    ModulePtr random_module(const Ring& ring, std::size_t extra) {
        SupportBox box{6, -6, 8};
        BigradedModule::Builder b(ring, box, false);
        b.add("one", 0, 0).add("c1", 0, 1).add("c2", 0, 2);
        for (std::size_t k = 0; k < extra; ++k) {
            int s = static_cast<int>(rng() % 3);
            int t = static_cast<int>(rng() % 5) - 2;
            b.add("g" + std::to_string(k), s, t);
        }
        return b.build();
    }

    /* multiplication with the unit acting as identity and all other products
     * zero: a genuine graded algebra */
    MultiOp trivial_mu(const ModulePtr& M, Index unit) {
        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        for (Index x = 0; x < M->dim(); ++x) {
            mu.set_value({unit, x}, unit_vec(x));
            if (x != unit) mu.set_value({x, unit}, unit_vec(x));
        }
        return mu;
    }

    std::shared_ptr<DAInfAlgebra> valid_structure(const Ring& ring) {
        std::size_t extra = 2 + rng() % 4;
        ModulePtr M = random_module(ring, extra);
        Truncation tr;
        tr.box = M->box();
        tr.arity_max = 4;
        auto E = std::make_shared<DAInfAlgebra>(M, "one", tr);
        Index unit = E->unit();
        E->set_op(0, 2, trivial_mu(M, unit));
        /* single-entry square-zero differential avoiding the unit */
        MultiOp d = MultiOp::uniform(M, 1, M, 0, 1);
        bool placed = false;
        for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
            Index a = static_cast<Index>(rng() % M->dim());
            if (a == unit) continue;
            Bidegree want = M->degree(a) - Bidegree{0, 1};
            for (Index b : M->cell(want)) {
                if (b == unit || b == a) continue;
                SparseVec v;
                v.add_term(ring, b, from_int(ring, 1 + static_cast<long>(rng() % 3)));
                d.set_value({a}, std::move(v));
                placed = true;
                break;
            }
        }
        if (placed) E->set_op(0, 1, std::move(d));
        return conjugate(E);
    }

    /* transport the structure along a random unit-preserving degree-0
     * automorphism: stays valid, tables become non-monomial */
    std::shared_ptr<DAInfAlgebra> conjugate(const std::shared_ptr<DAInfAlgebra>& E) {
        const ModulePtr& M = E->module();
        const Ring& ring = E->ring();
        GradedMap phi = GradedMap::identity(M);
        /* a couple of unit-triangular column operations within cells */
        for (int k = 0; k < 4; ++k) {
            Index a = static_cast<Index>(rng() % M->dim());
            const auto& cell = M->cell(M->degree(a));
            if (cell.size() < 2) continue;
            Index b = cell[rng() % cell.size()];
            if (a == b || a == E->unit()) continue;
            SparseVec v = phi.col(a);
            v.add_scaled(ring, phi.col(b), from_int(ring, 1 + static_cast<long>(rng() % 2)));
            phi.set_col(a, std::move(v));
        }
        /* inverse by forward substitution: phi = I + N with N cellwise */
        GradedMap inv = GradedMap::identity(M);
        for (int iter = 0; iter < 6; ++iter) {
            /* Newton-ish: inv <- inv * (2I - phi*inv) converges for unipotent */
            GradedMap pi = compose_graded_maps(phi, inv);
            GradedMap twoI = GradedMap::identity(M).plus(GradedMap::identity(M));
            GradedMap corr = twoI.plus(pi.negated());
            inv = compose_graded_maps(inv, corr);
        }
        if (!compose_graded_maps(phi, inv).equal_to(GradedMap::identity(M))) return E; /* give up */

        auto out = std::make_shared<DAInfAlgebra>(M, E->unit_label(), E->truncation());
        for (const auto& [ij, op] : E->ops()) {
            auto [i, j] = ij;
            MultiOp nop = MultiOp::uniform(M, static_cast<std::size_t>(j), M, op.dh(), op.dv());
            std::vector<ModulePtr> mods(static_cast<std::size_t>(j), M);
            for_each_tuple(mods, M->box().s_max, [&](const TupleKey& key) {
                /* apply inv to each slot (degree 0: no Koszul signs) */
                TensorElem x = tuple_elem(key);
                for (std::size_t w = 0; w < static_cast<std::size_t>(j); ++w)
                    x = apply_middle(graded_to_multiop(inv), w, x, mods);
                OpVal v = apply_full(op, x, mods);
                if (v.is_escaped()) {
                    nop.mark_escaped(key);
                    return;
                }
                auto img = phi.apply(v.vec);
                if (!img.has_value()) {
                    nop.mark_escaped(key);
                    return;
                }
                if (!img->empty()) nop.set_value(key, std::move(*img));
            });
            out->set_op(i, j, std::move(nop));
        }
        return out;
    }

    /* arbitrary degree-correct tables (usually not a dA-infinity algebra) */
    std::shared_ptr<DAInfAlgebra> random_structure(const Ring& ring) {
        std::size_t extra = 2 + rng() % 4;
        ModulePtr M = random_module(ring, extra);
        Truncation tr;
        tr.box = M->box();
        tr.arity_max = 4;
        auto E = std::make_shared<DAInfAlgebra>(M, "one", tr);
        Index unit = E->unit();
        E->set_op(0, 2, trivial_mu(M, unit));
        std::vector<std::pair<int, int>> shapes = {{0, 1}, {1, 1}, {0, 2}, {2, 1}, {0, 3}, {1, 2}};
        for (auto [i, j] : shapes) {
            if (rng() % 2) continue;
            MultiOp op = (i == 0 && j == 2) ? trivial_mu(M, unit)
                                            : MultiOp::uniform(M, static_cast<std::size_t>(j), M, i, 2 - (i + j));
            std::vector<ModulePtr> mods(static_cast<std::size_t>(j), M);
            for_each_tuple(mods, M->box().s_max, [&](const TupleKey& key) {
                if (std::find(key.begin(), key.end(), unit) != key.end()) return;
                if (rng() % 3) return;
                Bidegree want = op.tuple_degree(key) - op.shift();
                SparseVec v;
                for (Index l : M->cell(want))
                    if (rng() % 2) v.add_term(ring, l, from_int(ring, static_cast<long>(rng() % 5) - 2));
                if (!v.empty()) op.set_value(key, std::move(v));
            });
            E->set_op(i, j, std::move(op));
        }
        return E;
    }

    /* break d^2 = 0 along the built-in vertical chain c2 -> c1 -> one */
    std::shared_ptr<DAInfAlgebra> corrupt(const std::shared_ptr<DAInfAlgebra>& E) {
        const ModulePtr& M = E->module();
        const Ring& ring = E->ring();
        auto out = std::make_shared<DAInfAlgebra>(M, E->unit_label(), E->truncation());
        for (const auto& [ij, op] : E->ops()) out->set_op(ij.first, ij.second, op);
        MultiOp d = out->op(0, 1) ? *out->op(0, 1) : MultiOp::uniform(M, 1, M, 0, 1);
        SparseVec v1;
        v1.add_term(ring, M->index_of("c1"), from_int(ring, 1));
        d.set_value({M->index_of("c2")}, std::move(v1));
        SparseVec v0;
        v0.add_term(ring, M->index_of("one"), from_int(ring, 1));
        d.set_value({M->index_of("c1")}, std::move(v0));
        out->set_op(0, 1, std::move(d));
        return out;
    }
};

}  // namespace dainf_test
