#include "doctest.h"

#include "embcomm/errors.hpp"
#include "embcomm/kernels.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

using namespace embcomm::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<double> v(n);
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

std::complex<double> reference_cdot(const std::vector<double>& ar, const std::vector<double>& ai,
                                    const std::vector<double>& br, const std::vector<double>& bi) {
    std::complex<long double> s = 0.0L;
    for (std::size_t k = 0; k < ar.size(); ++k) {
        s += std::conj(std::complex<long double>(ar[k], ai[k])) * std::complex<long double>(br[k], bi[k]);
    }
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

void check_table(const KernelTable& t) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(t.isa) + 100);
    for (std::size_t n = 0; n <= 67; ++n) {
        const auto ar = random_vector(rng, n);
        const auto ai = random_vector(rng, n);
        const auto br = random_vector(rng, n);
        const auto bi = random_vector(rng, n);
        const auto got = t.cdot(ar.data(), ai.data(), br.data(), bi.data(), n);
        const auto want = reference_cdot(ar, ai, br, bi);
        const double scale = 1.0 + static_cast<double>(n);
        CHECK(std::abs(got - want) <= 1e-13 * scale);
    }
    for (std::size_t m : {1u, 3u, 4u, 8u, 17u, 1024u}) {
        for (std::size_t l : {1u, 2u, 5u}) {
            const auto ar = random_vector(rng, m);
            const auto ai = random_vector(rng, m);
            const auto yr = random_vector(rng, m * l);
            const auto yi = random_vector(rng, m * l);
            double want = 0.0;
            for (std::size_t c = 0; c < l; ++c) {
                const std::vector<double> cr(yr.begin() + static_cast<long>(c * m), yr.begin() + static_cast<long>((c + 1) * m));
                const std::vector<double> ci(yi.begin() + static_cast<long>(c * m), yi.begin() + static_cast<long>((c + 1) * m));
                want += std::norm(reference_cdot(ar, ai, cr, ci));
            }
            const double got = t.snapshot_energy(ar.data(), ai.data(), yr.data(), yi.data(), m, l);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

} // namespace

TEST_CASE("scalar kernels match an extended-precision reference") { check_table(scalar_table()); }

TEST_CASE("vector kernels match the scalar kernels") {
    for (Isa isa : {Isa::Avx2, Isa::Neon}) {
        if (!available(isa)) {
            CHECK_THROWS_AS(table_for(isa), embcomm::DomainError);
            continue;
        }
        const KernelTable& v = table_for(isa);
        CHECK(v.isa == isa);
        check_table(v);
        std::mt19937_64 rng(5);
        for (std::size_t n : {0u, 1u, 5u, 64u, 1023u, 1024u}) {
            const auto ar = random_vector(rng, n);
            const auto ai = random_vector(rng, n);
            const auto br = random_vector(rng, n);
            const auto bi = random_vector(rng, n);
            const auto s = scalar_table().cdot(ar.data(), ai.data(), br.data(), bi.data(), n);
            const auto w = v.cdot(ar.data(), ai.data(), br.data(), bi.data(), n);
            CHECK(std::abs(s - w) <= 1e-12 * (1.0 + std::abs(s) + std::sqrt(static_cast<double>(n))));
        }
    }
}

TEST_CASE("active table is available") {
    const KernelTable& a = active();
    CHECK(available(a.isa));
    CHECK(available(Isa::Scalar));
    CHECK(std::string(isa_name(a.isa)).size() > 0);
    CHECK(a.cdot != nullptr);
    CHECK(a.snapshot_energy != nullptr);
}
