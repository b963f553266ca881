#include "shearlab/checkpoint.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace shearlab {

namespace {

constexpr char kMagic[8] = {'S', 'H', 'L', 'A', 'B', 'C', 'K', '1'};

SystemTag tag_from(const std::string& s) {
    if (s == "full") return SystemTag::full;
    if (s == "interior") return SystemTag::interior;
    if (s == "error") return SystemTag::error;
    throw IoError("checkpoint: unknown system tag '" + s + "'");
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
    if (ck.states.empty()) throw std::invalid_argument("checkpoint: no states");
    const Grid& g = ck.states.front().omega.grid();
    nlohmann::json h;
    h["format"] = "shearlab-checkpoint";
    h["version"] = 1;
    h["grid"] = {{"nx", g.nx()}, {"ny", g.ny()}, {"half_length_y", g.ly()},
                 {"dealias_fraction", g.spec().dealias_fraction}};
    h["states"] = nlohmann::json::array();
    for (const auto& s : ck.states) {
        if (!s.omega.grid().same_as(g) || !s.theta.grid().same_as(g))
            throw std::invalid_argument("checkpoint: states on different grids");
        h["states"].push_back({{"t", s.t}, {"tag", to_string(s.tag)}});
    }
    h["metadata"] = nlohmann::json::parse(ck.metadata_json);
    const std::string header = h.dump();
    std::string blob(kMagic, 8);
    const std::uint64_t len = header.size();
    blob.append(reinterpret_cast<const char*>(&len), sizeof len);
    blob += header;
    for (const auto& s : ck.states)
        for (const SpectralField* f : {&s.omega, &s.theta})
            blob.append(reinterpret_cast<const char*>(f->coeffs().data()), f->coeffs().size() * sizeof(cplx));
    write_file_atomic(path, blob);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw IoError("not a shearlab checkpoint: " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || len > (1u << 26)) throw IoError("corrupt checkpoint header: " + path);
    std::string header(len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("truncated checkpoint header: " + path);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(header);
    } catch (const std::exception& e) {
        throw IoError(std::string("checkpoint header is not JSON: ") + e.what());
    }
    const auto& gj = h.at("grid");
    GridPtr grid = make_grid(gj.at("nx").get<int>(), gj.at("ny").get<int>(), gj.at("half_length_y").get<double>(),
                             gj.at("dealias_fraction").get<double>());
    Checkpoint ck;
    ck.metadata_json = h.value("metadata", nlohmann::json::object()).dump();
    for (const auto& sj : h.at("states")) {
        SimState s;
        s.t = sj.at("t").get<double>();
        s.tag = tag_from(sj.at("tag").get<std::string>());
        s.omega = SpectralField(grid, s.t);
        s.theta = SpectralField(grid, s.t);
        for (SpectralField* f : {&s.omega, &s.theta}) {
            in.read(reinterpret_cast<char*>(f->coeffs().data()),
                    static_cast<std::streamsize>(f->coeffs().size() * sizeof(cplx)));
            if (!in) throw IoError("truncated checkpoint data: " + path);
        }
        ck.states.push_back(std::move(s));
    }
    return ck;
}

}  // namespace shearlab
