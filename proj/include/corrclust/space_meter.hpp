#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace corrclust {

/// Word-level accounting of algorithm state (one word = 8 bytes). Components
/// charge and release their own word counts; the peak is monotone.
class SpaceMeter {
 public:
  void alloc(long long words) {
    current_ += words;
    if (current_ > peak_) peak_ = current_;
  }
  void release(long long words) {
    current_ -= words;
    if (current_ < 0) throw std::logic_error("SpaceMeter: released more than allocated");
  }
  void reset() { current_ = peak_ = 0; }

  long long words_current() const { return current_; }
  long long words_peak() const { return peak_; }

  void record_phase(const std::string& phase) { phases_.push_back({phase, peak_}); }
  const std::vector<std::pair<std::string, long long>>& phases() const { return phases_; }

  void write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("SpaceMeter: cannot open " + path);
    out << "phase,words_peak\n";
    for (auto& [phase, peak] : phases_) out << phase << ',' << peak << '\n';
  }

 private:
  long long current_ = 0;
  long long peak_ = 0;
  std::vector<std::pair<std::string, long long>> phases_;
};

}  // namespace corrclust
