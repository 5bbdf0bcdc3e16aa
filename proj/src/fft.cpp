#include "mwf/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mwf::fft {
namespace {

// FFTW plan creation is not thread-safe; fftw_execute_dft on a ready plan is.
// Plans are created once per (n, sign) with FFTW_UNALIGNED so they can be
// re-executed on any caller buffer.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> in(static_cast<size_t>(n)), out(static_cast<size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, in.data(), out.data(), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw NumericalError("fftw_plan_dft_1d failed for n=" + std::to_string(n));
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(const Complex* in, Complex* out, int n, int sign) {
    if (n < 1) throw std::invalid_argument("fft: n must be >= 1");
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    fftw_plan p = cache().get(n, sign);
    // fftw_execute_dft does not modify the input array for out-of-place plans.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace

void forward_unitary(const Complex* in, Complex* out, int n) { run(in, out, n, FFTW_FORWARD); }
void inverse_unitary(const Complex* in, Complex* out, int n) { run(in, out, n, FFTW_BACKWARD); }

CVec forward_unitary(const CVec& in) {
    CVec out(in.size());
    forward_unitary(in.data(), out.data(), static_cast<int>(in.size()));
    return out;
}

CVec inverse_unitary(const CVec& in) {
    CVec out(in.size());
    inverse_unitary(in.data(), out.data(), static_cast<int>(in.size()));
    return out;
}

Complex unit_phase(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw std::invalid_argument("unit_phase: den must be positive");
    std::int64_t r = num % den;
    if (r < 0) r += den;
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(r) / static_cast<double>(den));
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace mwf::fft
