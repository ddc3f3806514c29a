#pragma once

#include "dainf/transfer.hpp"

namespace dainf {

/* One worked example, packaged: the dga A, the resolving bidga B, the strict
 * map phi: B -> A, the published transfer choices, and the expected minimal
 * model with its published labels. */
struct FixtureBundle {
    std::string name;
    AlgebraPtr A, B;
    DAInfMorphism phi;
    TransferHints hints;
    TransferHints alt_hints; /* ext only: the other f_{11}(ab) choice */
    AlgebraPtr expected_E;
};

/* k = Z/p^2 (p odd), A the exterior dga on one degree-one generator with
 * d(w) = p; B the divided-power resolution truncated at y_N. */
FixtureBundle fixture_zp2(long p, int gamma_trunc = 3);

/* k = Z, the endomorphism dga of the two-step resolution of Z/p, resolved by
 * two-by-two matrices over polynomial-exterior coefficients; t-powers are
 * truncated by w = t-degree + vertical degree <= w_max. */
FixtureBundle fixture_ext(long p, int w_max = 6);

/* a formal exterior algebra over Z with zero differential */
FixtureBundle fixture_formal();

FixtureBundle fixture_by_name(const std::string& name, long p);

}  // namespace dainf
