#include "idf/manifest.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "idf/errors.hpp"

namespace idf::synth {

void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream f(path, std::ios::binary);  // binary: LF endings everywhere
    if (!f) throw IoError("write_manifest: cannot open " + path);
    char buf[512];
    f << "manifest_version=1\n";
    std::snprintf(buf, sizeof buf, "master_seed=%016" PRIx64 "\n", m.master_seed);
    f << buf;
    f << "n_identities=" << m.n_identities << "\n";
    f << "frames_per_config=" << m.frames_per_config << "\n";
    f << "sigma_levels=";
    for (size_t i = 0; i < m.sigma_levels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6f", i ? "," : "", m.sigma_levels[i]);
        f << buf;
    }
    f << "\n";
    for (const auto& r : m.frames) {
        std::snprintf(buf, sizeof buf,
                      "frame path=%s identity=%d sigma_index=%d sigma_px=%.6f frame_index=%d "
                      "seed=%016" PRIx64
                      " pupil_x=%.6f pupil_y=%.6f pupil_r=%.6f iris_r=%.6f eyelid=%.6f\n",
                      r.path.c_str(), r.identity_id, r.sigma_index, r.sigma_px, r.frame_index,
                      r.frame_seed, r.truth.pupil.cx, r.truth.pupil.cy, r.truth.pupil.r,
                      r.truth.limbus.r, r.truth.eyelid_coverage);
        f << buf;
    }
    if (!f) throw IoError("write_manifest: write failed for " + path);
}

namespace {

// key=value tokens separated by single spaces
std::string field(const std::string& line, const char* key) {
    std::string pat = std::string(key) + "=";
    size_t pos = line.find(pat);
    if (pos == std::string::npos)
        throw IoError("read_manifest: missing field '" + std::string(key) + "'");
    size_t start = pos + pat.size();
    size_t end = line.find(' ', start);
    return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

Manifest read_manifest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_manifest: cannot open " + path);
    Manifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            if (line.rfind("frame ", 0) == 0) {
                FrameRecord r;
                r.path = field(line, "path");
                r.identity_id = std::stoi(field(line, "identity"));
                r.sigma_index = std::stoi(field(line, "sigma_index"));
                r.sigma_px = std::stod(field(line, "sigma_px"));
                r.frame_index = std::stoi(field(line, "frame_index"));
                r.frame_seed = std::stoull(field(line, "seed"), nullptr, 16);
                r.truth.identity_id = r.identity_id;
                r.truth.pupil.cx = std::stod(field(line, "pupil_x"));
                r.truth.pupil.cy = std::stod(field(line, "pupil_y"));
                r.truth.pupil.r = std::stod(field(line, "pupil_r"));
                r.truth.limbus = {r.truth.pupil.cx, r.truth.pupil.cy,
                                  std::stod(field(line, "iris_r"))};
                r.truth.eyelid_coverage = std::stod(field(line, "eyelid"));
                m.frames.push_back(std::move(r));
            } else if (line.rfind("master_seed=", 0) == 0) {
                m.master_seed = std::stoull(line.substr(12), nullptr, 16);
            } else if (line.rfind("n_identities=", 0) == 0) {
                m.n_identities = std::stoi(line.substr(13));
            } else if (line.rfind("frames_per_config=", 0) == 0) {
                m.frames_per_config = std::stoi(line.substr(18));
            } else if (line.rfind("sigma_levels=", 0) == 0) {
                std::stringstream ss(line.substr(13));
                std::string tok;
                while (std::getline(ss, tok, ',')) m.sigma_levels.push_back(std::stod(tok));
            }
        } catch (const std::exception& e) {
            throw IoError("read_manifest: line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return m;
}

}  // namespace idf::synth
