#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "multiflow/errors.hpp"
#include "multiflow/snapshot.hpp"

namespace multiflow {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw SnapshotError(path + ": truncated file (header)");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw SnapshotError(path + ": truncated file (payload)");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void put_field(std::ostream& out, const std::vector<double>& vals) {
    for (double d : vals) put_f64(out, d);
}

}  // namespace

void write_snapshot(const FlowState& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open '" + path + "' for writing");

    const Grid& grid = s.grid();
    const QuadratureSet& quad = s.rho.quad;
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(grid.dim()));
    put_u32(out, static_cast<std::uint32_t>(grid.n()));
    put_u32(out, static_cast<std::uint32_t>(quad.n()));
    for (double w : quad.weights()) put_f64(out, w);
    for (double c : quad.masses()) put_f64(out, c);
    for (const auto& r : s.rho.rho) put_field(out, r.values());
    for (const auto& v : s.u.u)
        for (int c = 0; c < grid.dim(); ++c) put_field(out, v[c].values());
    out.flush();
    if (!out) throw SnapshotError("write to '" + path + "' failed");
}

FlowState read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open '" + path + "' for reading");

    char magic[4];
    if (!in.read(magic, 4)) throw SnapshotError(path + ": truncated file (magic)");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw SnapshotError(path + ": bad magic, not a state file");
    std::uint32_t version = get_u32(in, path);
    if (version != kVersion)
        throw SnapshotError(path + ": unsupported version " + std::to_string(version));

    std::uint32_t dim = get_u32(in, path);
    std::uint32_t nn = get_u32(in, path);
    std::uint32_t n = get_u32(in, path);
    if (dim < 1 || dim > 2 || n == 0 || nn < 8)
        throw SnapshotError(path + ": implausible header (dim=" + std::to_string(dim) +
                            " N=" + std::to_string(nn) + " n=" + std::to_string(n) + ")");

    Grid grid(static_cast<int>(dim), static_cast<int>(nn));
    std::vector<double> weights(n), masses(n), labels(n);
    for (std::uint32_t i = 0; i < n; ++i) weights[i] = get_f64(in, path);
    for (std::uint32_t i = 0; i < n; ++i) masses[i] = get_f64(in, path);
    for (std::uint32_t i = 0; i < n; ++i) labels[i] = static_cast<double>(i);

    auto read_field = [&] {
        std::vector<double> vals(grid.size());
        for (auto& d : vals) d = get_f64(in, path);
        return ScalarField(grid, std::move(vals));
    };

    std::vector<ScalarField> rho;
    for (std::uint32_t i = 0; i < n; ++i) rho.push_back(read_field());
    std::vector<VectorField> u;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<ScalarField> comps;
        for (std::uint32_t c = 0; c < dim; ++c) comps.push_back(read_field());
        u.emplace_back(std::move(comps));
    }
    char extra;
    if (in.read(&extra, 1)) throw SnapshotError(path + ": trailing bytes after payload");

    QuadratureSet quad(std::move(labels), std::move(weights), std::move(masses));
    return FlowState(MultiVelocity(quad, std::move(u)), MultiDensity(quad, std::move(rho)), 0.0);
}

}  // namespace multiflow
