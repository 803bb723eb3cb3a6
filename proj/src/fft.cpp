#include "pdolab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace pdolab::fft {
namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int rank, int G, int sign, fftw_complex* buf) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(rank, G, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  std::vector<int> dims(rank, G);
  // FFTW_UNALIGNED keeps the plan valid for whatever buffer we execute on.
  fftw_plan p = fftw_plan_dft(rank, dims.data(), buf, buf, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fftw_plan_dft failed");
  plan_cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(std::vector<std::complex<double>>& data, int rank, int G, int sign) {
  if (rank <= 0) return;
  std::size_t want = 1;
  for (int i = 0; i < rank; ++i) want *= static_cast<std::size_t>(G);
  if (data.size() != want)
    throw std::invalid_argument("fft::dft: data size does not match rank/G");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan p = plan_for(rank, G, sign == -1 ? FFTW_FORWARD : FFTW_BACKWARD, buf);
  fftw_execute_dft(p, buf, buf);
}

}  // namespace pdolab::fft
