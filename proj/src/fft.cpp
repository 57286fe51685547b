#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace biharmonic::fft {
namespace {

struct PlanCache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex);
        auto it = plans.find({n, sign});
        if (it != plans.end()) return it->second;
        // Plan on scratch buffers; FFTW_UNALIGNED lets the plan run on any
        // array through fftw_execute_dft, which FFTW documents as thread-safe.
        std::vector<fftw_complex> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), a.data(), b.data(), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(std::make_pair(n, sign), plan);
        return plan;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(const std::complex<double>* in, std::complex<double>* out, std::size_t n, int sign) {
    fftw_plan plan = cache().get(n, sign);
    // FFTW never writes through the input pointer of an out-of-place c2c plan.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in));
    fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    run(in, out, n, FFTW_FORWARD);
}

void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    run(in, out, n, FFTW_BACKWARD);
}

}  // namespace biharmonic::fft
