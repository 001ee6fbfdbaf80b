// Copyright 2026 The FIBER Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV and JSON output with a provenance header. Every CSV starts with a
// "# {json}" line holding the resolved configuration, then a header row.
// Reals are written in scientific notation with 17 significant digits.

#ifndef FIBER_IO_HPP_
#define FIBER_IO_HPP_

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiber/error.hpp"
#include "fiber/models.hpp"

namespace fiber {

using CsvCell = std::variant<double, long long, std::string>;

// Writes to a file, or to stdout when the path is "-" or empty.
class OutputStream {
 public:
  explicit OutputStream(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw FiberError(ErrorCode::kIo, "cannot open " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const nlohmann::json& config,
            std::vector<std::string> columns)
      : out_(out), width_(columns.size()) {
    out_ << "# " << config.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out_ << (i ? "," : "") << columns[i];
    }
    out_ << "\n";
  }

  void Row(const std::vector<CsvCell>& cells) {
    internal::RequireSameSize(cells.size(), width_, "CSV row");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      if (const double* d = std::get_if<double>(&cells[i])) {
        out_ << internal::FormatDouble(*d);
      } else if (const long long* n = std::get_if<long long>(&cells[i])) {
        out_ << *n;
      } else {
        out_ << std::get<std::string>(cells[i]);
      }
    }
    out_ << "\n";
  }

 private:
  std::ostream& out_;
  std::size_t width_;
};

inline void WriteJson(std::ostream& out, const nlohmann::json& j) {
  out << j.dump(2) << "\n";
}

}  // namespace fiber

#endif  // FIBER_IO_HPP_
