#include <bit>
#include <cstring>
#include <fstream>

#include "eqrl/waveform.hpp"

namespace eqrl {

namespace {

static_assert(std::endian::native == std::endian::little,
              "dataset format is little-endian; big-endian hosts unsupported");

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

constexpr char kMagic[4] = {'E', 'Q', 'W', 'F'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put<std::uint16_t>(os, kVersion);
    put<std::uint32_t>(os, ds.n_x);
    put<float>(os, static_cast<float>(ds.dt_ps));
    put<float>(os, static_cast<float>(ds.t_ui_ps));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(ds.records.size()));
    for (const auto& rec : ds.records) {
        if (rec.input.samples.size() != ds.n_x || rec.output.samples.size() != ds.n_x)
            throw IoError("write_dataset: record length differs from header n_x: " + path);
        put<std::uint8_t>(os, rec.label);
        os.write(reinterpret_cast<const char*>(rec.input.samples.data()),
                 static_cast<std::streamsize>(sizeof(float) * ds.n_x));
        os.write(reinterpret_cast<const char*>(rec.output.samples.data()),
                 static_cast<std::streamsize>(sizeof(float) * ds.n_x));
    }
    if (!os) throw IoError("write failed: " + path);
    os.close();

    if (!ds.manifest_json.empty()) {
        std::ofstream ms(path + ".json", std::ios::trunc);
        if (!ms) throw IoError("cannot open for writing: " + path + ".json");
        ms << ds.manifest_json;
        if (!ms) throw IoError("write failed: " + path + ".json");
    }
}

Dataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("not an EQWF dataset: " + path);
    const auto version = get<std::uint16_t>(is);
    if (version != kVersion) throw IoError("unsupported dataset version: " + path);

    Dataset ds;
    ds.n_x = get<std::uint32_t>(is);
    ds.dt_ps = static_cast<double>(get<float>(is));
    ds.t_ui_ps = static_cast<double>(get<float>(is));
    const auto count = get<std::uint64_t>(is);
    if (!is) throw IoError("truncated dataset header: " + path);

    ds.records.resize(count);
    for (auto& rec : ds.records) {
        rec.label = get<std::uint8_t>(is);
        rec.input.dt = rec.output.dt = ds.dt_ps;
        rec.input.t_ui = rec.output.t_ui = ds.t_ui_ps;
        rec.input.samples.resize(ds.n_x);
        rec.output.samples.resize(ds.n_x);
        is.read(reinterpret_cast<char*>(rec.input.samples.data()),
                static_cast<std::streamsize>(sizeof(float) * ds.n_x));
        is.read(reinterpret_cast<char*>(rec.output.samples.data()),
                static_cast<std::streamsize>(sizeof(float) * ds.n_x));
        if (!is) throw IoError("truncated dataset record: " + path);
    }

    std::ifstream ms(path + ".json");
    if (ms) {
        ds.manifest_json.assign(std::istreambuf_iterator<char>(ms),
                                std::istreambuf_iterator<char>());
    }
    return ds;
}

}  // namespace eqrl
