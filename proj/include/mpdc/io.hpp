#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <mpdc/circuit.hpp>

namespace mpdc {

// Provenance block written into every file.  Layer, site, and step labels
// are 1-based in files, wire labels 0-based; the C++ API is 0-based.
struct FileMeta {
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> parameters;
};

std::string format_double(double value);  // %.17g, shared by all text formats

void save_mps(const MpsState& psi, const std::filesystem::path& path, const FileMeta& meta = {});
MpsState load_mps(const std::filesystem::path& path, FileMeta* meta = nullptr);

void save_circuit(const EncodedCircuit& circuit, const std::filesystem::path& path,
                  const FileMeta& meta = {});
// Rejects files whose gates are out of generation order or not unitary
// to within 1e-10.
EncodedCircuit load_circuit(const std::filesystem::path& path, FileMeta* meta = nullptr);

void save_schedule(const QubitSchedule& schedule, const std::filesystem::path& path,
                   const FileMeta& meta = {});
QubitSchedule load_schedule(const std::filesystem::path& path, FileMeta* meta = nullptr);

// Per-depth quality table: `#` meta lines, then a fixed header row
// `depth,nlf,max_discarded_weight,seconds` and one row per depth.
void save_report_csv(const EncodeReport& report, const std::filesystem::path& path,
                     const FileMeta& meta = {});

// Generic numeric table with the same meta-line convention.
void save_table_csv(const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows,
                    const std::filesystem::path& path, const FileMeta& meta = {});

// Wire-reuse program as text: exactly three header lines (format tag, meta,
// dimensions), then one line per instruction.  Gate matrices go into a
// `<stem>.matrices.json` sidecar next to the program file.
void write_qasm_like(const QubitSchedule& schedule, const std::filesystem::path& path,
                     const FileMeta& meta = {});

}  // namespace mpdc
