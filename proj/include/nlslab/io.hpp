#pragma once

#include "nlslab/grid.hpp"

#include <string>
#include <vector>

namespace nlslab {

/// Shortest round-trip decimal representation, '.' decimal point, no locale.
std::string format_number(double v);

/// RFC-4180 field quoting (only when the field contains ',', '"' or newline).
std::string csv_escape(const std::string& field);

/// RFC-4180 writer: CRLF record separators, deterministic formatting.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);
    void numeric_row(const std::vector<double>& values);

private:
    struct Impl;
    Impl* impl_;
};

/// Packed binary snapshot: magic "NLSF0001", i64 n, f64 half_length, f64 t,
/// then n interleaved (re, im) f64 pairs. Little-endian host order.
void write_snapshot(const std::string& path, const ComplexField& f, double t);

struct Snapshot {
    ComplexField field;
    double t = 0.0;
};

/// Reads a packed snapshot; reuses `grid` when its (L, N) match, otherwise
/// builds a fresh grid. Throws std::runtime_error on format mismatch.
Snapshot read_snapshot(const std::string& path, const GridPtr& grid = nullptr);

/// Column-text snapshot (x, Re, Im), one node per line.
void write_snapshot_text(const std::string& path, const ComplexField& f, double t);

} // namespace nlslab
