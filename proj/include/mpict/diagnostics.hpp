#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace mpict {

// A non-fatal problem encountered while processing dirty input. Operations
// collect these instead of failing; callers decide what to surface.
struct Diagnostic {
  std::string code;     // stable machine-readable identifier
  std::string message;  // human-readable detail
  std::string context;  // program id or file path, may be empty
  int line = 0;         // 1-based when known, 0 otherwise
};

class Diagnostics {
 public:
  void add(std::string code, std::string message, std::string context = {},
           int line = 0) {
    entries_.push_back(Diagnostic{std::move(code), std::move(message),
                                  std::move(context), line});
  }

  void merge(Diagnostics&& other) {
    for (auto& d : other.entries_) entries_.push_back(std::move(d));
    other.entries_.clear();
  }

  const std::vector<Diagnostic>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::size_t count(std::string_view code) const {
    std::size_t n = 0;
    for (const auto& d : entries_)
      if (d.code == code) ++n;
    return n;
  }

 private:
  std::vector<Diagnostic> entries_;
};

// Sinks are optional everywhere; a null sink drops the record.
inline void report(Diagnostics* sink, std::string code, std::string message,
                   std::string context = {}, int line = 0) {
  if (sink)
    sink->add(std::move(code), std::move(message), std::move(context), line);
}

}  // namespace mpict
