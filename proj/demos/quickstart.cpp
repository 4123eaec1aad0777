// Compress a synthetic breath-like tone burst, send it through the PECS
// codec and reconstruct it with CoSaMP.

#include <cmath>
#include <cstdio>
#include <vector>

#include "physioedge/physioedge.hpp"

int main() {
  using namespace physioedge;

  constexpr std::size_t n = 8000 * 4;
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / 8000.0;
    const double envelope = 0.5 * (1.0 - std::cos(2.0 * M_PI * t / 4.0));
    s[k] = envelope * (0.5 * std::sin(2.0 * M_PI * 220.0 * t) + 0.3 * std::sin(2.0 * M_PI * 610.0 * t));
  }
  const auto signal = Signal::respiratory(std::move(s));

  const auto record = compress(signal, 0xC0FFEEu, StepPolicy(4));
  const auto bytes = write_record(record);
  const auto received = read_record(bytes);

  ReconstructorChoice choice;
  choice.K = 48;
  choice.block_len = 1024;
  const auto estimate = reconstruct(received, choice);

  const auto m = evaluate(signal, estimate, received.achieved_cr());
  const auto bt = power_lookup(LinkProfile::measured(), Transport::bluetooth, 10);
  std::printf("kept %zu of %zu samples (%zu bytes on the wire)\n", received.values.size(), n, bytes.size());
  std::printf("cr=%.3f rrmse=%.4f cc=%.4f\n", m.cr_achieved, m.rrmse, m.cc);
  std::printf("bluetooth at cr 10: %.1f mW (%s)\n", bt.power_mw, std::string(to_string(bt.source)).c_str());
}
