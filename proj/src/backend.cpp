#include "qgen/backend.hpp"

namespace qgen {

std::string apply_stop_sequences(std::string text, const std::vector<std::string>& stops) {
  size_t cut = std::string::npos;
  for (const auto& stop : stops) {
    if (stop.empty()) continue;
    size_t pos = text.find(stop);
    if (pos != std::string::npos && pos < cut) cut = pos;
  }
  if (cut != std::string::npos) text.resize(cut);
  return text;
}

}  // namespace qgen
