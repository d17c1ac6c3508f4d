#include "idf/dft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace idf::dft {

namespace {

std::mutex plan_mutex;
std::map<std::pair<int, int>, fftw_plan> plan_cache;  // (n, sign) -> plan

fftw_plan get_plan(int n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;
    // Plan on a scratch buffer; executed later via the new-array interface.
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void transform(std::vector<std::complex<double>>& data, bool inverse) {
    const int n = static_cast<int>(data.size());
    if (n == 0) throw std::invalid_argument("dft: empty input");
    fftw_plan p = get_plan(n, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
    if (inverse) {
        const double scale = 1.0 / n;
        for (auto& z : data) z *= scale;
    }
}

void transform2d(std::vector<std::complex<double>>& data, int w, int h, bool inverse) {
    if (w <= 0 || h <= 0 || data.size() != static_cast<size_t>(w) * h)
        throw std::invalid_argument("dft: bad 2-D dimensions");
    std::vector<std::complex<double>> row(static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        std::copy_n(data.begin() + static_cast<size_t>(y) * w, w, row.begin());
        transform(row, inverse);
        std::copy_n(row.begin(), w, data.begin() + static_cast<size_t>(y) * w);
    }
    std::vector<std::complex<double>> col(static_cast<size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[y] = data[static_cast<size_t>(y) * w + x];
        transform(col, inverse);
        for (int y = 0; y < h; ++y) data[static_cast<size_t>(y) * w + x] = col[y];
    }
}

}  // namespace idf::dft
