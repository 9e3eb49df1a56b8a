// Quick tour of the library: exact counts, exact moments, an asymptotic
// estimate, and a small sampling run.

#include <cstdio>

#include "involab/asym.hpp"
#include "involab/esf.hpp"
#include "involab/feller.hpp"
#include "involab/perm_core.hpp"
#include "involab/series.hpp"

int main() {
    using namespace involab;

    // exact factorization counts from a cycle type
    const auto type = CycleType::from_dense({2, 1});  // two fixed points + one 2-cycle
    std::printf("invol(1^2 2) = %s, B = %s\n", invol(type).str().c_str(),
                big_b(type).str().c_str());

    // exact Ewens moments via the generating series
    const auto params = ESFParams::from_rational(BigRat(1, 2));
    std::printf("E_10 invol at theta=1/2: %s\n",
                rational_to_string(mean_invol_exact(10, params)).c_str());

    // closed-form growth law vs the series oracle
    auto F = mean_generating_series<RealDomain>(Real(1), 2000);
    const Real exact = moment_from_series_real(F, 2000, Real(1));
    const Real approx = mean_asym(2000, Real(1)).value;
    std::printf("n=2000 exact/asymptotic mean ratio: %.6f\n",
                (exact / approx).convert_to<double>());

    // one coupled sample of the spacing process
    Rng rng(12345, 0);
    const auto s = feller_sample(100000, 1.0, 4, rng);
    std::printf("sample at n=1e5: %lld cycles, log invol = %.3f\n",
                static_cast<long long>(s.c.total_cycles()),
                log_invol_counts(s.c.counts(), s.n));
    return 0;
}
