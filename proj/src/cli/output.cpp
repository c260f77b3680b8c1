#include "landau/cli/output.hpp"

#include "landau/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace landau::cli {

namespace {

void emit(const nlohmann::json& j, int indent, int depth, std::string& out) {
    using T = nlohmann::json::value_t;
    const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    switch (j.type()) {
    case T::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            out += (first ? "" : ",") + pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
            emit(it.value(), indent, depth + 1, out);
            first = false;
        }
        out += close + "}";
        return;
    }
    case T::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[";
        bool first = true;
        for (const auto& v : j) {
            out += (first ? "" : ",") + pad;
            emit(v, indent, depth + 1, out);
            first = false;
        }
        out += close + "]";
        return;
    }
    case T::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
        // keep a float a float on reparse
        if (std::strpbrk(buf, ".eEn") == nullptr) out += ".0";
        return;
    }
    default:
        out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    emit(j, indent, 0, out);
    return out;
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << dump_json(j) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw Error("cannot read " + p.string());
    return nlohmann::json::parse(f);
}

CsvWriter::CsvWriter(const std::filesystem::path& p, const std::string& hash, const std::vector<std::string>& columns)
    : n_(columns.size()) {
    f_ = std::fopen(p.string().c_str(), "wb");
    if (!f_) throw Error("cannot write " + p.string());
    std::fprintf(f_, "# config_hash=%s schema=%d\n", hash.c_str(), schema_version);
    for (std::size_t i = 0; i < columns.size(); ++i) std::fprintf(f_, "%s%s", i ? "," : "", columns[i].c_str());
    std::fputc('\n', f_);
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_) throw Error("csv row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) std::fprintf(f_, "%s%.17g", i ? "," : "", values[i]);
    std::fputc('\n', f_);
}

void write_snapshot(const std::filesystem::path& p, const SpectralState& s, const std::string& hash) {
    static_assert(std::endian::native == std::endian::little, "snapshot files are little-endian");
    std::FILE* f = std::fopen(p.string().c_str(), "wb");
    if (!f) throw Error("cannot write " + p.string());
    const Grid& g = s.grid();
    std::fprintf(f, "LANDAU-SNAPSHOT %d hash=%s k_max=%d V=%.17g N_v=%d t=%.17g\n", schema_version, hash.c_str(), g.k_max,
                 g.V, g.n_v, s.t());
    const auto& d = s.data();
    std::fwrite(d.data(), sizeof(cplx), d.size(), f);
    std::fclose(f);
}

SpectralState read_snapshot(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error("cannot read " + p.string());
    std::string header;
    std::getline(f, header);
    std::istringstream hs(header);
    std::string magic, field;
    int version = 0;
    hs >> magic >> version;
    if (magic != "LANDAU-SNAPSHOT" || version != schema_version) throw Error(p.string() + ": not a snapshot file");
    Grid g;
    double t = 0.0;
    while (hs >> field) {
        const auto eq = field.find('=');
        const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "k_max") g.k_max = std::stoi(val);
        else if (key == "V") g.V = std::stod(val);
        else if (key == "N_v") g.n_v = std::stoi(val);
        else if (key == "t") t = std::stod(val);
    }
    g.validate();
    SpectralState s(g, t);
    auto& d = s.data();
    f.read(reinterpret_cast<char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(cplx)));
    if (f.gcount() != static_cast<std::streamsize>(d.size() * sizeof(cplx))) throw Error(p.string() + ": truncated snapshot");
    return s;
}

}  // namespace landau::cli
