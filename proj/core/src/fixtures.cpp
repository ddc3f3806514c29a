#include "dainf/fixtures.hpp"

namespace dainf {

namespace {

/* insert a computed table value, recording explicit zeros where the implicit
 * convention (zero inside the box, escaped outside a truncated box) would
 * disagree with the computed truth */
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

Int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

/* ------------------------------------------------------------------ *
 *  zp2(p): k = Z/p^2, A = exterior dga on w with d(w) = p,
 *  B = V (x) H with V = k[a,b,u,v]/(a^2,b^2,au-bv,auv,buv,u^2,v^2),
 *  H = exterior(x) (x) divided-powers(y) truncated at y_N.
 * ------------------------------------------------------------------ */

constexpr unsigned VA = 1, VB = 2, VU = 4, VV = 8;

const char* vname(unsigned m) {
    switch (m) {
        case 0: return "1";
        case VA: return "a";
        case VB: return "b";
        case VA | VB: return "ab";
        case VU: return "u";
        case VV: return "v";
        case VA | VU: return "au";
        case VA | VV: return "av";
        case VB | VU: return "bu";
        case VU | VV: return "uv";
    }
    return nullptr;
}

const unsigned V_BASIS[10] = {0, VA, VB, VA | VB, VU, VV, VA | VU, VA | VV, VB | VU, VU | VV};

/* normal form in V; returns false when the monomial is zero.  Besides the
 * listed relations, abu = b(au) = b(bv) = 0 and abv = a(bv) = a(au) = 0. */
bool v_normalize(unsigned& m) {
    if ((m & (VA | VU | VV)) == (VA | VU | VV)) return false;
    if ((m & (VB | VU | VV)) == (VB | VU | VV)) return false;
    if ((m & (VA | VB | VU)) == (VA | VB | VU)) return false;
    if ((m & (VA | VB | VV)) == (VA | VB | VV)) return false;
    if ((m & (VB | VV)) == (VB | VV)) {
        if (m & (VA | VU)) return false; /* a or u would square */
        m = (m & ~(VB | VV)) | VA | VU;
    }
    return true;
}

/* product of two normal-form monomials: (mask, sign) or zero */
bool v_mult(unsigned m1, unsigned m2, unsigned& out, int& sign) {
    if (m1 & m2) return false;
    sign = ((m1 & VV) && (m2 & VU)) ? -1 : 1;
    out = m1 | m2;
    return v_normalize(out);
}

int v_vdeg(unsigned m) { return ((m & VU) ? 1 : 0) + ((m & VV) ? 1 : 0); }

/* d_0 on a V monomial: list of (mask, sign) */
std::vector<std::pair<unsigned, int>> v_d0(unsigned m) {
    std::vector<std::pair<unsigned, int>> out;
    if (m & VU) {
        if (!(m & VA)) {
            unsigned t = (m & ~VU) | VA;
            if (v_normalize(t)) out.push_back({t, 1});
        }
    }
    if (m & VV) {
        int sign = (m & VU) ? -1 : 1;
        if (!(m & VB)) {
            unsigned t = (m & ~VV) | VB;
            if (v_normalize(t)) out.push_back({t, sign});
        }
    }
    return out;
}

struct Zp2Basis {
    unsigned vmask;
    int xexp, yidx;
};

std::string zp2_label(unsigned vmask, int xexp, int yidx) {
    std::string h;
    if (xexp == 0 && yidx == 0)
        h = "1";
    else if (yidx == 0)
        h = "x";
    else if (xexp == 0)
        h = "y" + std::to_string(yidx);
    else
        h = "xy" + std::to_string(yidx);
    std::string v = vname(vmask);
    if (v == std::string("1")) return h;
    if (h == "1") return v;
    return v + "." + h;
}

}  // namespace

FixtureBundle fixture_zp2(long p, int gamma_trunc) {
    if (p < 3 || p % 2 == 0) throw DainfError("fixture zp2 needs an odd prime p");
    const int N = gamma_trunc;
    Ring ring = Ring::integers_mod(Int(p) * Int(p));
    SupportBox box{2 * N + 2, -1, 6};

    FixtureBundle fx;
    fx.name = "zp2(" + std::to_string(p) + ")";

    /* ----- A ----- */
    {
        BigradedModule::Builder b(ring, SupportBox{0, -1, 6}, false);
        b.add("1", 0, 0).add("w", 0, 1);
        ModulePtr M = b.build();
        Truncation tr;
        tr.box = M->box();
        tr.arity_max = 4;
        auto A = std::make_shared<DAInfAlgebra>(M, "1", tr);
        Index one = M->index_of("1"), w = M->index_of("w");
        MultiOp d = MultiOp::uniform(M, 1, M, 0, 1);
        SparseVec pv;
        pv.add_term(ring, one, from_int(ring, p));
        d.set_value({w}, std::move(pv));
        A->set_op(0, 1, std::move(d));
        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        mu.set_value({one, one}, unit_vec(one));
        mu.set_value({one, w}, unit_vec(w));
        mu.set_value({w, one}, unit_vec(w));
        A->set_op(0, 2, std::move(mu));
        fx.A = A;
    }

    /* ----- B = V (x) H ----- */
    std::vector<Zp2Basis> basis;
    {
        BigradedModule::Builder b(ring, box, true);
        b.faithful(SupportBox{2 * N + 1, box.t_min, box.t_max});
        for (unsigned vm : V_BASIS)
            for (int e = 0; e <= 1; ++e)
                for (int i = 0; i <= N; ++i) {
                    int s = 2 * i + e;
                    int t = v_vdeg(vm);
                    if (s > box.s_max) continue;
                    b.add(zp2_label(vm, e, i), s, t);
                    basis.push_back({vm, e, i});
                }
        ModulePtr M = b.build();
        Truncation tr;
        tr.box = box;
        tr.arity_max = 4;
        auto B = std::make_shared<DAInfAlgebra>(M, "1", tr);

        auto idx = [&](unsigned vm, int e, int i) { return M->index_of(zp2_label(vm, e, i)); };

        /* vertical differential d_0 = d_V (x) 1 */
        MultiOp d0 = MultiOp::uniform(M, 1, M, 0, 1);
        for (const auto& el : basis) {
            SparseVec v;
            for (auto& [vm, sg] : v_d0(el.vmask))
                v.add_term(ring, idx(vm, el.xexp, el.yidx), from_int(ring, sg));
            put_val(d0, {idx(el.vmask, el.xexp, el.yidx)}, false, v);
        }
        B->set_op(0, 1, std::move(d0));

        /* horizontal differential: d_1(x y_i) = (p - p a + b) y_i,
         * d_1(y_i) = (p - b - ab) x y_{i-1}, V-linearly */
        MultiOp d1 = MultiOp::uniform(M, 1, M, 1, 0);
        auto vmul_into = [&](unsigned vm, unsigned factor, long coef, int e, int i, SparseVec& acc) {
            unsigned out;
            int sg;
            if (!v_mult(vm, factor, out, sg)) return;
            acc.add_term(ring, idx(out, e, i), from_int(ring, coef * sg));
        };
        for (const auto& el : basis) {
            SparseVec v;
            if (el.xexp == 1) {
                vmul_into(el.vmask, 0, p, 0, el.yidx, v);
                vmul_into(el.vmask, VA, -p, 0, el.yidx, v);
                vmul_into(el.vmask, VB, 1, 0, el.yidx, v);
            } else if (el.yidx >= 1) {
                vmul_into(el.vmask, 0, p, 1, el.yidx - 1, v);
                vmul_into(el.vmask, VB, -1, 1, el.yidx - 1, v);
                vmul_into(el.vmask, VA | VB, -1, 1, el.yidx - 1, v);
            }
            put_val(d1, {idx(el.vmask, el.xexp, el.yidx)}, false, v);
        }
        B->set_op(1, 1, std::move(d1));

        /* multiplication */
        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        for (const auto& e1 : basis)
            for (const auto& e2 : basis) {
                TupleKey k{idx(e1.vmask, e1.xexp, e1.yidx), idx(e2.vmask, e2.xexp, e2.yidx)};
                unsigned vm;
                int sg;
                SparseVec v;
                bool esc = false;
                if (v_mult(e1.vmask, e2.vmask, vm, sg) && !(e1.xexp && e2.xexp)) {
                    Scalar c = from_int(ring, binom(e1.yidx + e2.yidx, e1.yidx) * sg);
                    if (!is_zero(c)) {
                        if (e1.yidx + e2.yidx > N)
                            esc = true;
                        else
                            v.add_term(ring, idx(vm, e1.xexp + e2.xexp, e1.yidx + e2.yidx), c);
                    }
                }
                put_val(mu, k, esc, v);
            }
        B->set_op(0, 2, std::move(mu));
        fx.B = B;
    }

    /* ----- phi: B -> A ----- */
    {
        const ModulePtr& MB = fx.B->module();
        const ModulePtr& MA = fx.A->module();
        MultiOp f = MultiOp::uniform(MB, 1, MA, 0, 0);
        Index one = MA->index_of("1"), w = MA->index_of("w");
        auto alpha_v = [&](unsigned vm) -> SparseVec {
            SparseVec v;
            switch (vm) {
                case 0: v.add_term(ring, one, from_int(ring, 1)); break;
                case VA: v.add_term(ring, one, from_int(ring, p)); break;
                case VB: v.add_term(ring, one, from_int(ring, -p)); break;
                case VU: v.add_term(ring, w, from_int(ring, 1)); break;
                case VV: v.add_term(ring, w, from_int(ring, -1)); break;
                case VA | VU: v.add_term(ring, w, from_int(ring, p)); break;
                case VA | VV: v.add_term(ring, w, from_int(ring, -p)); break;
                case VB | VU: v.add_term(ring, w, from_int(ring, -p)); break;
                default: break; /* ab, uv -> 0 */
            }
            return v;
        };
        for (const auto& el : basis) {
            if (el.xexp || el.yidx) continue; /* horizontal degree >= 1 maps to 0 */
            SparseVec v = alpha_v(el.vmask);
            if (!v.empty()) f.set_value({MB->index_of(zp2_label(el.vmask, el.xexp, el.yidx))}, std::move(v));
        }
        DAInfMorphism phi(fx.B, fx.A);
        phi.set_comp(0, 1, std::move(f));
        fx.phi = std::move(phi);
    }

    /* ----- published hints ----- */
    {
        const ModulePtr& MB = fx.B->module();
        auto cyc = [&](const std::string& lbl) { return unit_vec(MB->index_of(lbl)); };
        for (int i = 0; i <= N; ++i) {
            fx.hints.section[{2 * i, 0}].push_back({"Y" + std::to_string(i), cyc(zp2_label(0, 0, i))});
            fx.hints.section[{2 * i + 1, 0}].push_back({"x.Y" + std::to_string(i), cyc(zp2_label(0, 1, i))});
            fx.hints.section[{2 * i, 1}].push_back({"z.Y" + std::to_string(i), cyc(zp2_label(VA | VU, 0, i))});
            fx.hints.section[{2 * i + 1, 1}].push_back({"xz.Y" + std::to_string(i), cyc(zp2_label(VA | VU, 1, i))});
        }
        auto& lifts = fx.hints.lifts[{1, 1}];
        for (int i = 0; i <= N; ++i) {
            SparseVec fy;
            if (i >= 1) {
                fy.add_term(ring, MB->index_of(zp2_label(VV, 1, i - 1)), from_int(ring, 1));
                fy.add_term(ring, MB->index_of(zp2_label(VA | VV, 1, i - 1)), from_int(ring, 1));
            }
            lifts[{"Y" + std::to_string(i)}] = fy;
            SparseVec fx11;
            fx11.add_term(ring, MB->index_of(zp2_label(VU, 0, i)), from_int(ring, p));
            fx11.add_term(ring, MB->index_of(zp2_label(VV, 0, i)), from_int(ring, -1));
            lifts[{"x.Y" + std::to_string(i)}] = fx11;
        }
    }

    /* ----- expected minimal model ----- */
    {
        BigradedModule::Builder b(ring, box, true);
        b.faithful(SupportBox{2 * N + 1, box.t_min, box.t_max});
        for (int i = 0; i <= N; ++i) {
            b.add("Y" + std::to_string(i), 2 * i, 0);
            b.add("x.Y" + std::to_string(i), 2 * i + 1, 0);
            b.add("z.Y" + std::to_string(i), 2 * i, 1);
            b.add("xz.Y" + std::to_string(i), 2 * i + 1, 1);
        }
        ModulePtr M = b.build();
        Truncation tr;
        tr.box = box;
        tr.arity_max = 4;
        auto E = std::make_shared<DAInfAlgebra>(M, "Y0", tr);
        auto elabel = [&](int z, int x, int y) {
            std::string l = "Y" + std::to_string(y);
            if (z && x) return "xz." + l;
            if (z) return "z." + l;
            if (x) return "x." + l;
            return l;
        };
        struct EB {
            int z, x, y;
        };
        std::vector<EB> ebasis;
        for (int i = 0; i <= N; ++i)
            for (int z = 0; z <= 1; ++z)
                for (int x = 0; x <= 1; ++x) ebasis.push_back({z, x, i});
        auto eidx = [&](int z, int x, int y) { return M->index_of(elabel(z, x, y)); };

        MultiOp m11 = MultiOp::uniform(M, 1, M, 1, 0);
        for (const auto& e : ebasis) {
            SparseVec v;
            if (e.x == 1)
                v.add_term(ring, eidx(e.z, 0, e.y), from_int(ring, p));
            else if (e.y >= 1)
                v.add_term(ring, eidx(e.z, 1, e.y - 1), from_int(ring, p));
            put_val(m11, {eidx(e.z, e.x, e.y)}, false, v);
        }
        E->set_op(1, 1, std::move(m11));

        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        for (const auto& e1 : ebasis)
            for (const auto& e2 : ebasis) {
                if ((2 * e1.y + e1.x) + (2 * e2.y + e2.x) > box.s_max) continue;
                TupleKey k{eidx(e1.z, e1.x, e1.y), eidx(e2.z, e2.x, e2.y)};
                SparseVec v;
                bool esc = false;
                if (!(e1.z && e2.z) && !(e1.x && e2.x)) {
                    Scalar c = from_int(ring, binom(e1.y + e2.y, e1.y));
                    if (!is_zero(c)) {
                        if (e1.y + e2.y > N)
                            esc = true;
                        else
                            v.add_term(ring, eidx(e1.z + e2.z, e1.x + e2.x, e1.y + e2.y), c);
                    }
                }
                put_val(mu, k, esc, v);
            }
        E->set_op(0, 2, std::move(mu));

        MultiOp m21 = MultiOp::uniform(M, 1, M, 2, -1);
        for (const auto& e : ebasis) {
            SparseVec v;
            if (e.z == 0 && e.y >= 1) v.add_term(ring, eidx(1, e.x, e.y - 1), from_int(ring, 1));
            put_val(m21, {eidx(e.z, e.x, e.y)}, false, v);
        }
        E->set_op(2, 1, std::move(m21));
        fx.expected_E = E;
    }
    return fx;
}

/* ------------------------------------------------------------------ *
 *  ext(p): k = Z, A = End of the two-step resolution of Z/p,
 *  B = Mat_2(Z[t] (x) Lambda(lambda)), truncated by w = m + vdeg <= W.
 * ------------------------------------------------------------------ */

namespace {

enum MatElt { MI = 0, MH = 1, M21 = 2, M12 = 3 };
const char* mat_name(int m) {
    switch (m) {
        case MI: return "I";
        case MH: return "h";
        case M21: return "e21";
        case M12: return "e12";
    }
    return nullptr;
}
int mat_vdeg(int m) { return m == M21 ? 1 : (m == M12 ? -1 : 0); }

/* products in the basis I, h = e22, e21, e12 (I the identity matrix) */
std::vector<std::pair<int, long>> mat_mult(int a, int b) {
    if (a == MI) return {{b, 1}};
    if (b == MI) return {{a, 1}};
    if (a == MH && b == MH) return {{MH, 1}};
    if (a == MH && b == M21) return {{M21, 1}};
    if (a == M12 && b == MH) return {{M12, 1}};
    if (a == M21 && b == M12) return {{MH, 1}};
    if (a == M12 && b == M21) return {{MI, 1}, {MH, -1}};
    return {};
}

std::string ext_label(int m, int e, int M) {
    std::string s;
    if (m) s += "t" + std::to_string(m) + ".";
    if (e) s += "L.";
    s += mat_name(M);
    return s;
}

}  // namespace

FixtureBundle fixture_ext(long p, int w_max) {
    if (p < 2) throw DainfError("fixture ext needs a prime p >= 2");
    Ring ring = Ring::integers();
    const int W = w_max;
    /* the box bounds relation instances: arity-4 tuples of s <= 1 factors */
    SupportBox box{4, -4, 4};

    FixtureBundle fx;
    fx.name = "ext(" + std::to_string(p) + ")";

    /* ----- A ----- */
    {
        BigradedModule::Builder b(ring, SupportBox{0, -1, 1}, false);
        b.add("I", 0, 0).add("h", 0, 0).add("e21", 0, 1).add("e12", 0, -1);
        ModulePtr M = b.build();
        Truncation tr;
        tr.box = M->box();
        tr.arity_max = 4;
        auto A = std::make_shared<DAInfAlgebra>(M, "I", tr);
        MultiOp d = MultiOp::uniform(M, 1, M, 0, 1);
        SparseVec v1;
        v1.add_term(ring, M->index_of("I"), from_int(ring, p));
        d.set_value({M->index_of("e21")}, std::move(v1));
        SparseVec v2;
        v2.add_term(ring, M->index_of("e12"), from_int(ring, p));
        d.set_value({M->index_of("h")}, std::move(v2));
        A->set_op(0, 1, std::move(d));
        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        for (int a = 0; a < 4; ++a)
            for (int b2 = 0; b2 < 4; ++b2) {
                SparseVec v;
                for (auto& [mm, c] : mat_mult(a, b2)) v.add_term(ring, M->index_of(mat_name(mm)), from_int(ring, c));
                put_val(mu, {M->index_of(mat_name(a)), M->index_of(mat_name(b2))}, false, v);
            }
        A->set_op(0, 2, std::move(mu));
        fx.A = A;
    }

    /* ----- B ----- */
    struct ExtB {
        int m, e, M;
    };
    std::vector<ExtB> basis;
    {
        BigradedModule::Builder b(ring, box, true);
        for (int M = 0; M < 4; ++M)
            for (int e = 0; e <= 1; ++e)
                for (int m = 0; m + mat_vdeg(M) <= W; ++m) {
                    b.add(ext_label(m, e, M), e, mat_vdeg(M));
                    basis.push_back({m, e, M});
                }
        ModulePtr MB = b.build();
        Truncation tr;
        tr.box = box;
        tr.arity_max = 4;
        auto B = std::make_shared<DAInfAlgebra>(MB, "I", tr);
        auto idx = [&](int m, int e, int M) { return MB->index_of(ext_label(m, e, M)); };

        MultiOp d0 = MultiOp::uniform(MB, 1, MB, 0, 1);
        for (const auto& el : basis) {
            SparseVec v;
            if (el.M == MH)
                v.add_term(ring, idx(el.m + 1, el.e, M12), from_int(ring, 1));
            else if (el.M == M21)
                v.add_term(ring, idx(el.m + 1, el.e, MI), from_int(ring, 1));
            put_val(d0, {idx(el.m, el.e, el.M)}, false, v);
        }
        B->set_op(0, 1, std::move(d0));

        MultiOp d1 = MultiOp::uniform(MB, 1, MB, 1, 0);
        for (const auto& el : basis) {
            SparseVec v;
            bool esc = false;
            if (el.e == 1) {
                if (el.m + 1 + mat_vdeg(el.M) <= W) {
                    v.add_term(ring, idx(el.m, 0, el.M), from_int(ring, p));
                    v.add_term(ring, idx(el.m + 1, 0, el.M), from_int(ring, -1));
                } else {
                    esc = true;
                }
            }
            put_val(d1, {idx(el.m, el.e, el.M)}, esc, v);
        }
        B->set_op(1, 1, std::move(d1));

        MultiOp mu = MultiOp::uniform(MB, 2, MB, 0, 0);
        for (const auto& e1 : basis)
            for (const auto& e2 : basis) {
                TupleKey k{idx(e1.m, e1.e, e1.M), idx(e2.m, e2.e, e2.M)};
                SparseVec v;
                bool esc = false;
                if (!(e1.e && e2.e)) {
                    for (auto& [mm, c] : mat_mult(e1.M, e2.M)) {
                        int m = e1.m + e2.m;
                        if (m + mat_vdeg(mm) > W) {
                            esc = true;
                            break;
                        }
                        v.add_term(ring, idx(m, e1.e + e2.e, mm), from_int(ring, c));
                    }
                }
                put_val(mu, k, esc, esc ? SparseVec{} : v);
            }
        B->set_op(0, 2, std::move(mu));
        fx.B = B;
    }

    /* ----- phi: t -> p ----- */
    {
        const ModulePtr& MB = fx.B->module();
        const ModulePtr& MA = fx.A->module();
        MultiOp f = MultiOp::uniform(MB, 1, MA, 0, 0);
        for (const auto& el : basis) {
            if (el.e) continue;
            Int c = 1;
            for (int i = 0; i < el.m; ++i) c *= p;
            SparseVec v;
            v.add_term(ring, MA->index_of(mat_name(el.M)), from_int(ring, c));
            f.set_value({MB->index_of(ext_label(el.m, el.e, el.M))}, std::move(v));
        }
        DAInfMorphism phi(fx.B, fx.A);
        phi.set_comp(0, 1, std::move(f));
        fx.phi = std::move(phi);
    }

    /* ----- hints ----- */
    {
        const ModulePtr& MB = fx.B->module();
        auto cyc = [&](const std::string& lbl) { return unit_vec(MB->index_of(lbl)); };
        fx.hints.section[{0, 0}].push_back({"I", cyc("I")});
        fx.hints.section[{0, -1}].push_back({"a", cyc("e12")});
        fx.hints.section[{1, 0}].push_back({"b", cyc("L.I")});
        fx.hints.section[{1, -1}].push_back({"ab", cyc("L.e12")});
        auto& lifts = fx.hints.lifts[{1, 1}];
        lifts[{"b"}] = cyc("e21");
        lifts[{"ab"}] = cyc("h");
        lifts[{"a"}] = SparseVec{};
        fx.alt_hints = fx.hints;
        SparseVec alt;
        alt.add_term(ring, MB->index_of("I"), from_int(ring, -1));
        alt.add_term(ring, MB->index_of("h"), from_int(ring, 1));
        fx.alt_hints.lifts[{1, 1}][{"ab"}] = alt; /* -e11 = h - I */
    }

    /* ----- expected minimal model ----- */
    {
        BigradedModule::Builder b(ring, box, true);
        b.add("I", 0, 0).add("a", 0, -1).add("b", 1, 0).add("ab", 1, -1);
        ModulePtr M = b.build();
        Truncation tr;
        tr.box = box;
        tr.arity_max = 4;
        auto E = std::make_shared<DAInfAlgebra>(M, "I", tr);
        Index iI = M->index_of("I"), ia = M->index_of("a"), ib = M->index_of("b"), iab = M->index_of("ab");

        MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
        for (Index x = 0; x < M->dim(); ++x)
            for (Index y = 0; y < M->dim(); ++y) {
                SparseVec v;
                if (x == iI)
                    v = unit_vec(y);
                else if (y == iI)
                    v = unit_vec(x);
                else if ((x == ia && y == ib) || (x == ib && y == ia))
                    v = unit_vec(iab);
                put_val(mu, {x, y}, false, v);
            }
        E->set_op(0, 2, std::move(mu));

        MultiOp m11 = MultiOp::uniform(M, 1, M, 1, 0);
        for (Index x = 0; x < M->dim(); ++x) {
            SparseVec v;
            if (x == ib) v.add_term(ring, iI, from_int(ring, p));
            if (x == iab) v.add_term(ring, ia, from_int(ring, p));
            put_val(m11, {x}, false, v);
        }
        E->set_op(1, 1, std::move(m11));

        MultiOp m12 = MultiOp::uniform(M, 2, M, 1, -1);
        for (Index x = 0; x < M->dim(); ++x)
            for (Index y = 0; y < M->dim(); ++y) {
                SparseVec v;
                if (x == ia && y == ib) v.add_term(ring, iI, from_int(ring, 1));
                if (x == ia && y == iab) v.add_term(ring, ia, from_int(ring, 1));
                if (x == iab && y == ib) v.add_term(ring, ib, from_int(ring, -1));
                if (x == iab && y == iab) v.add_term(ring, iab, from_int(ring, -1));
                put_val(m12, {x, y}, false, v);
            }
        E->set_op(1, 2, std::move(m12));
        fx.expected_E = E;
    }
    return fx;
}

FixtureBundle fixture_formal() {
    Ring ring = Ring::integers();
    SupportBox box{0, 0, 1};
    FixtureBundle fx;
    fx.name = "formal";
    BigradedModule::Builder b(ring, box, false);
    b.add("1", 0, 0).add("g", 0, 1);
    ModulePtr M = b.build();
    Truncation tr;
    tr.box = box;
    tr.arity_max = 4;
    auto A = std::make_shared<DAInfAlgebra>(M, "1", tr);
    MultiOp mu = MultiOp::uniform(M, 2, M, 0, 0);
    Index one = M->index_of("1"), g = M->index_of("g");
    mu.set_value({one, one}, unit_vec(one));
    mu.set_value({one, g}, unit_vec(g));
    mu.set_value({g, one}, unit_vec(g));
    A->set_op(0, 2, std::move(mu));
    fx.A = A;
    fx.B = A;
    fx.phi = DAInfMorphism::identity(fx.A);
    fx.hints.section[{0, 0}].push_back({"1", unit_vec(one)});
    fx.hints.section[{0, 1}].push_back({"g", unit_vec(g)});

    BigradedModule::Builder be(ring, box, false);
    be.add("1", 0, 0).add("g", 0, 1);
    ModulePtr ME = be.build();
    auto E = std::make_shared<DAInfAlgebra>(ME, "1", tr);
    MultiOp mue = MultiOp::uniform(ME, 2, ME, 0, 0);
    Index eo = ME->index_of("1"), eg = ME->index_of("g");
    mue.set_value({eo, eo}, unit_vec(eo));
    mue.set_value({eo, eg}, unit_vec(eg));
    mue.set_value({eg, eo}, unit_vec(eg));
    E->set_op(0, 2, std::move(mue));
    fx.expected_E = E;
    return fx;
}

FixtureBundle fixture_by_name(const std::string& name, long p) {
    if (name == "zp2") return fixture_zp2(p);
    if (name == "ext") return fixture_ext(p);
    if (name == "formal") return fixture_formal();
    throw DainfError("unknown fixture: " + name);
}

}  // namespace dainf
