#include "nlslab/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace nlslab {

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_number: to_chars failed");
    return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvWriter::Impl {
    std::FILE* f = nullptr;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->f = std::fopen(path.c_str(), "wb");
    if (!impl_->f) {
        delete impl_;
        throw std::runtime_error("CsvWriter: cannot open " + path);
    }
}

CsvWriter::~CsvWriter() {
    if (impl_->f) std::fclose(impl_->f);
    delete impl_;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        const std::string esc = csv_escape(fields[i]);
        if (i) std::fputc(',', impl_->f);
        std::fwrite(esc.data(), 1, esc.size(), impl_->f);
    }
    std::fwrite("\r\n", 1, 2, impl_->f);
}

void CsvWriter::numeric_row(const std::vector<double>& values) {
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values) fields.push_back(format_number(v));
    row(fields);
}

namespace {
constexpr char kMagic[8] = {'N', 'L', 'S', 'F', '0', '0', '0', '1'};
}

void write_snapshot(const std::string& path, const ComplexField& f, double t) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_snapshot: cannot open " + path);
    const std::int64_t n = f.size();
    const double L = f.grid()->half_length();
    std::fwrite(kMagic, 1, 8, fp);
    std::fwrite(&n, sizeof(n), 1, fp);
    std::fwrite(&L, sizeof(L), 1, fp);
    std::fwrite(&t, sizeof(t), 1, fp);
    std::fwrite(f.values().data(), sizeof(cd), f.values().size(), fp);
    std::fclose(fp);
}

Snapshot read_snapshot(const std::string& path, const GridPtr& grid) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("read_snapshot: cannot open " + path);
    char magic[8];
    std::int64_t n = 0;
    double L = 0.0, t = 0.0;
    bool ok = std::fread(magic, 1, 8, fp) == 8 &&
              std::memcmp(magic, kMagic, 8) == 0 &&
              std::fread(&n, sizeof(n), 1, fp) == 1 &&
              std::fread(&L, sizeof(L), 1, fp) == 1 &&
              std::fread(&t, sizeof(t), 1, fp) == 1 && n > 0 && L > 0.0;
    if (!ok) {
        std::fclose(fp);
        throw std::runtime_error("read_snapshot: bad header in " + path);
    }
    GridPtr g = grid;
    if (!g || g->n() != n || g->half_length() != L)
        g = Grid::make(L, static_cast<int>(n));
    Snapshot snap{ComplexField(g), t};
    ok = std::fread(snap.field.values().data(), sizeof(cd),
                    static_cast<size_t>(n), fp) == static_cast<size_t>(n);
    std::fclose(fp);
    if (!ok) throw std::runtime_error("read_snapshot: truncated " + path);
    return snap;
}

void write_snapshot_text(const std::string& path, const ComplexField& f,
                         double t) {
    CsvWriter w(path);
    w.row({"x", "re", "im", "t=" + format_number(t)});
    for (int j = 0; j < f.size(); ++j)
        w.row({format_number(f.grid()->node(j)), format_number(f[j].real()),
               format_number(f[j].imag())});
}

} // namespace nlslab
