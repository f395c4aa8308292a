#include <doctest.h>

#include <cmath>

#include "gsr/errors.hpp"
#include "gsr/filters.hpp"
#include "gsr/generators.hpp"
#include "gsr/rng.hpp"

using namespace gsr;

namespace {

ShiftOperator diag_shift(const std::vector<double>& d) {
    Graph g;
    g.n = static_cast<int>(d.size());
    ShiftOperator s;
    s.kind = ShiftKind::Adjacency;
    s.graph = g;
    s.matrix = Matrix::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i) s.matrix(i, i) = d[i];
    return s;
}

/// Draws ER shifts until one decomposes with an all-distinct spectrum.
ShiftOperator distinct_er_shift(int n, double p, Rng& rng, SpectralBasis& basis) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        const ShiftOperator s = build_shift(gen_er(n, p, rng), ShiftKind::Adjacency);
        try {
            basis = decompose(s);
        } catch (const NonDiagonalizable&) {
            continue;
        }
        const SpectrumCensus c = spectrum_census(basis, 1);
        if (c.D == n - 1) return s;
    }
    FAIL("no distinct-spectrum ER draw found");
    return ShiftOperator{};
}

}  // namespace

TEST_CASE("design_lowpass_kernel: K = N leaves nothing to annihilate") {
    const SpectralBasis basis = decompose(diag_shift({3.0, 2.0, 1.0}));
    const FilterDesign f = design_lowpass_kernel(basis, 3);
    CHECK(f.length() == 1);
    CHECK(f.coeffs[0] == Complex(1.0, 0.0));
    CHECK((f.response - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("design_lowpass_kernel: diag(3,2,1), K=1 matches the hand-solved kernel") {
    const SpectralBasis basis = decompose(diag_shift({3.0, 2.0, 1.0}));
    const FilterDesign f = design_lowpass_kernel(basis, 1);
    CHECK(f.length() == 3);
    // kernel of [[1,2,4],[1,1,1]] is spanned by the coefficients of
    // (z-1)(z-2) = 2 - 3z + z^2; the sign rule then rotates the largest
    // entry (-3) onto the positive real axis
    Vector expected(3);
    expected << Complex(-2, 0), Complex(3, 0), Complex(-1, 0);
    expected /= expected.norm();
    CHECK((f.coeffs - expected).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(f.response[1]) <= 1e-10);
    CHECK(std::abs(f.response[2]) <= 1e-10);
    CHECK(std::abs(f.response[0]) > 1e-3);
}

TEST_CASE("design_lowpass_kernel: ER N=10 K=4 annihilates via an SVD-kernel oracle") {
    Rng rng(5);
    SpectralBasis basis;
    distinct_er_shift(10, 0.4, rng, basis);
    const FilterDesign f = design_lowpass_kernel(basis, 4);
    CHECK(f.length() == 7);  // L = D + 1 = (10 - 4) + 1
    const double scale = f.response.cwiseAbs().maxCoeff();
    for (int k = 4; k < 10; ++k) CHECK(std::abs(f.response[k]) <= 1e-8 * scale);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(f.response[k]) > 1e-8 * scale);

    // oracle: independent full-SVD kernel of the inactive Vandermonde rows
    const Matrix B = vandermonde(basis.eigenvalues, 7).bottomRows(6);
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
    Vector h_oracle = svd.matrixV().col(6);
    // compare up to phase
    const Complex phase = h_oracle.dot(f.coeffs) / std::abs(h_oracle.dot(f.coeffs));
    CHECK((h_oracle * phase - f.coeffs).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(f.kernel_gap > 1e3);
}

TEST_CASE("design_lowpass_kernel: active/inactive collision raises ConditionViolation") {
    const SpectralBasis basis = decompose(diag_shift({2.0, 2.0, 1.0}));
    CHECK_THROWS_AS(design_lowpass_kernel(basis, 1), ConditionViolation);
    // overriding proceeds, but the collision drags the passband to zero too
    const FilterDesign f = design_lowpass_kernel(basis, 1, /*override_condition_i=*/true);
    CHECK(f.response.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("lowpass_kernel_basis: L > D+1 exposes a multi-dimensional kernel") {
    const SpectralBasis basis = decompose(diag_shift({3.0, 2.0, 1.0}));
    const auto kernel = lowpass_kernel_basis(basis, 1, 4);  // D = 2, L = 4
    CHECK(kernel.size() == 2);
    const Matrix B = vandermonde(basis.eigenvalues, 4).bottomRows(2);
    for (const Vector& h : kernel) CHECK((B * h).norm() <= 1e-10);
}

TEST_CASE("design_annihilating_product: explicit 2x2 case") {
    const SpectralBasis basis = decompose(diag_shift({2.0, 1.0}));
    // kill lambda = 2 (index 0 after magnitude ordering)
    const FilterDesign f = design_annihilating_product(basis, {0});
    Vector expected(2);
    expected << Complex(-2, 0), Complex(1, 0);
    CHECK((f.coeffs - expected).cwiseAbs().maxCoeff() <= 1e-12);
    // H e = (S - 2I) kills the lambda=2 eigenvector
    CHECK(std::abs(f.response[0]) <= 1e-12);
    CHECK(std::abs(f.response[1] - Complex(-1, 0)) <= 1e-12);
}

TEST_CASE("design_annihilating_product: empty kill set is the scalar filter") {
    const SpectralBasis basis = decompose(diag_shift({2.0, 1.0}));
    const FilterDesign f = design_annihilating_product(basis, {}, Complex(3.0, 0.0));
    CHECK(f.length() == 1);
    CHECK(f.coeffs[0] == Complex(3.0, 0.0));
}

TEST_CASE("design_annihilating_product: repeated kill values collapse to one factor") {
    const SpectralBasis basis = decompose(diag_shift({2.0, 1.0, 1.0}));
    const FilterDesign f = design_annihilating_product(basis, {1, 2});
    CHECK(f.length() == 2);  // single factor (z - 1)
    CHECK(std::abs(f.response[1]) <= 1e-12);
    CHECK(std::abs(f.response[2]) <= 1e-12);
}

TEST_CASE("product and kernel designs agree up to a complex scale") {
    Rng rng(17);
    SpectralBasis basis;
    distinct_er_shift(10, 0.4, rng, basis);
    const FilterDesign kernel = design_lowpass_kernel(basis, 4);
    const FilterDesign product = design_annihilating_product(basis, {4, 5, 6, 7, 8, 9});
    const Complex ratio = kernel.response[0] / product.response[0];
    CHECK((kernel.response - ratio * product.response).norm() <=
          1e-9 * kernel.response.norm());
}

TEST_CASE("apply_filter_polynomial: identity and cycle shift") {
    const ShiftOperator s = build_shift(gen_cycle(5), ShiftKind::Adjacency);
    Rng rng(23);
    Vector x(5);
    for (int i = 0; i < 5; ++i) x[i] = Complex(rng.normal(), rng.normal());

    Vector h1(1);
    h1 << Complex(1, 0);
    CHECK((apply_filter_polynomial(s, h1, x) - x).norm() == 0.0);

    Vector h2(2);
    h2 << Complex(0, 0), Complex(1, 0);
    const Vector shifted = apply_filter_polynomial(s, h2, x);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(shifted[(i + 1) % 5] - x[i]) <= 1e-14);
}

TEST_CASE("apply_filter_polynomial: matches the spectral route on random triples") {
    Rng rng(31);
    int done = 0;
    for (int trial = 0; done < 200 && trial < 400; ++trial) {
        Rng sub = rng.substream(trial);
        const ShiftOperator s = build_shift(gen_er(8, 0.4, sub), ShiftKind::Adjacency);
        SpectralBasis basis;
        try {
            basis = decompose(s);
        } catch (const NonDiagonalizable&) {
            continue;
        }
        const int L = 1 + static_cast<int>(sub.next_u64() % 5);
        Vector h(L), x(8);
        for (int l = 0; l < L; ++l) h[l] = Complex(sub.normal(), sub.normal()) / double(L);
        for (int i = 0; i < 8; ++i) x[i] = Complex(sub.normal(), sub.normal());
        const Vector direct = apply_filter_polynomial(s, h, x);
        const Vector spectral =
            basis.V * (vandermonde(basis.eigenvalues, L) * h).asDiagonal() * (basis.Vinv * x);
        CHECK((direct - spectral).norm() <= 1e-9 * x.norm() * basis.cond_V *
                                                std::max(1.0, std::pow(basis.eig_scale, L - 1)));
        ++done;
    }
    CHECK(done == 200);
}

TEST_CASE("apply_diffusion_rate_filter: empty rates, single annihilation, karate band") {
    const Graph g = karate();
    const RealMatrix L = laplacian_matrix(g);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(L);
    const RealVector mu = es.eigenvalues();
    const RealMatrix U = es.eigenvectors();
    Rng rng(41);
    Vector x(34);
    for (int i = 0; i < 34; ++i) x[i] = Complex(rng.normal(), 0.0);

    CHECK((apply_diffusion_rate_filter(L, {}, x) - x).norm() == 0.0);

    // one step at 1/mu_max kills the top Laplacian eigenvector component
    const Vector once = apply_diffusion_rate_filter(L, {1.0 / mu(33)}, x);
    CHECK(std::abs(U.col(33).cast<Complex>().dot(once)) <= 1e-10 * x.norm());

    // Rates 1/mu(k) for k = 6..34 make the cascade's frequency response
    // prod_m (1 - mu_k/mu_m) exactly zero on those frequencies, so the
    // output is 5-bandlimited on the shift S = I - L/mu_max (active =
    // smallest Laplacian eigenvalues). The response is evaluated per
    // frequency; a 29-factor node-domain cascade with mu spread ~11x has
    // double-precision conditioning around 1e14 and cannot show the zeros
    // at 1e-8 directly.
    const ShiftOperator s = build_shift(g, ShiftKind::NormalizedLaplacianShift);
    const SpectralBasis basis = decompose(s);
    std::vector<double> rates;
    for (int k = 33; k >= 5; --k) rates.push_back(1.0 / mu(k));
    Vector response = Vector::Ones(34);
    for (int k = 0; k < 34; ++k)
        for (double a : rates) response[k] *= Complex(1.0 - a * mu(k), 0.0);
    const Vector xhat = basis.Vinv * x;
    const Vector zhat_oracle = response.cwiseProduct(xhat);
    CHECK(zhat_oracle.tail(29).cwiseAbs().maxCoeff() <= 1e-8 * zhat_oracle.norm());
    CHECK(zhat_oracle.head(5).cwiseAbs().minCoeff() > 0.0);

    // node-domain application agrees with the spectral route on a
    // well-conditioned sub-cascade
    std::vector<double> sub(rates.begin(), rates.begin() + 5);
    const Vector z5 = apply_diffusion_rate_filter(L, sub, x);
    Vector resp5 = Vector::Ones(34);
    for (int k = 0; k < 34; ++k)
        for (double a : sub) resp5[k] *= Complex(1.0 - a * mu(k), 0.0);
    const Vector z5_oracle = basis.V * resp5.cwiseProduct(xhat);
    CHECK((z5 - z5_oracle).norm() <= 1e-10 * x.norm());
    const Vector z5hat = basis.Vinv * z5;
    for (int k = 29; k < 34; ++k) CHECK(std::abs(z5hat[k]) <= 1e-10 * x.norm());
}

TEST_CASE("kernel designs keep a nonzero passband across random instances") {
    Rng rng(53);
    int done = 0;
    for (int trial = 0; done < 25 && trial < 120; ++trial) {
        Rng sub = rng.substream(trial);
        SpectralBasis basis;
        try {
            basis = decompose(build_shift(gen_er(9, 0.35, sub), ShiftKind::Adjacency));
        } catch (const NonDiagonalizable&) {
            continue;
        }
        const int K = 2 + static_cast<int>(sub.next_u64() % 4);
        if (!condition_i_holds(basis, K)) continue;
        const FilterDesign f = design_lowpass_kernel(basis, K);
        const double scale = f.response.cwiseAbs().maxCoeff();
        CHECK(f.response.head(K).cwiseAbs().minCoeff() > 1e-8 * scale);
        ++done;
    }
    CHECK(done == 25);
}

TEST_CASE("design_ideal_lowpass: flat passband and clean stopband") {
    const int N = 8;
    const SpectralBasis basis = decompose(build_shift(gen_cycle(N), ShiftKind::Adjacency));
    const FilterDesign f = design_ideal_lowpass(basis, 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(f.response[k] - Complex(1, 0)) <= 1e-10);
    for (int k = 4; k < 8; ++k) CHECK(std::abs(f.response[k]) <= 1e-10);
}
