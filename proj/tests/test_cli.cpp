#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
    const char* p = std::getenv("IRISDEFOCUS_BIN");
    REQUIRE_MESSAGE(p != nullptr, "IRISDEFOCUS_BIN must point at the CLI binary");
    return p;
}

int run(const std::string& args) {
    std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

const char* kMinimalConfig = R"({
    "master_seed": 5,
    "dataset": {"identities": 2, "frames_per_config": 2},
    "sigma_levels": [0, 5]
})";

}  // namespace

TEST_CASE("cli: synth writes the dataset and is idempotent by checksum") {
    fs::path dir = fs::temp_directory_path() / "idf_cli_synth";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_file(dir / "cfg.json", kMinimalConfig);

    int rc = run("synth --config " + (dir / "cfg.json").string() + " --out " + (dir / "d1").string());
    CHECK(rc == 0);
    long images = 0;
    for (auto& e : fs::directory_iterator(dir / "d1" / "images")) {
        (void)e;
        ++images;
    }
    CHECK(images == 8);
    CHECK(fs::exists(dir / "d1" / "manifest.txt"));

    rc = run("synth --config " + (dir / "cfg.json").string() + " --out " + (dir / "d2").string());
    CHECK(rc == 0);
    CHECK(slurp(dir / "d1" / "manifest.txt") == slurp(dir / "d2" / "manifest.txt"));
    fs::remove_all(dir);
}

TEST_CASE("cli: malformed config key exits 2 and names the key") {
    fs::path dir = fs::temp_directory_path() / "idf_cli_badcfg";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_file(dir / "bad.json", R"({"dataset": {"identitties": 3}})");
    std::string cmd = cli_bin() + " synth --config " + (dir / "bad.json").string() + " --out " +
                      (dir / "out").string() + " 2> " + (dir / "err.txt").string() + " >/dev/null";
    int rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 2);
    CHECK(slurp(dir / "err.txt").find("identitties") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli: gaze on a missing dataset exits 2, auth too") {
    fs::path dir = fs::temp_directory_path() / "idf_cli_missing";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run("auth --out " + (dir / "nowhere").string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("cli: psycho runs from CSVs and flags excluded participants") {
    fs::path dir = fs::temp_directory_path() / "idf_cli_psycho";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // p1 behaves; p2 answers `different` at sigma=0 half the time -> excluded
    std::string csv = "participant,sigma,response\n";
    for (int i = 0; i < 12; ++i) {
        csv += "p1,0," + std::string(i < 11 ? "same" : "different") + "\n";
        csv += "p1,1," + std::string(i < 10 ? "same" : "different") + "\n";
        csv += "p1,3," + std::string(i < 6 ? "same" : "different") + "\n";
        csv += "p1,5," + std::string(i < 2 ? "same" : "different") + "\n";
        csv += "p1,8," + std::string(i < 1 ? "same" : "different") + "\n";
        csv += "p2,0," + std::string(i < 6 ? "same" : "different") + "\n";
        csv += "p2,3,different\n";
    }
    write_file(dir / "responses.csv", csv);
    int rc = run("psycho --responses " + (dir / "responses.csv").string() + " --out " +
                 (dir / "out").string());
    CHECK(rc == 0);
    std::string excl = slurp(dir / "out" / "report" / "psycho_exclusions.csv");
    CHECK(excl.find("p2,excluded") != std::string::npos);
    CHECK(excl.find("p1,kept") != std::string::npos);

    // malformed response value: exit 2 naming the line
    write_file(dir / "broken.csv", "participant,sigma,response\np1,0,same\np1,1,maybe\n");
    std::string cmd = cli_bin() + " psycho --responses " + (dir / "broken.csv").string() +
                      " --out " + (dir / "out2").string() + " 2> " + (dir / "err.txt").string() +
                      " >/dev/null";
    rc = WEXITSTATUS(std::system(cmd.c_str()));
    CHECK(rc == 2);
    CHECK(slurp(dir / "err.txt").find("line(s) 3") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli: plot emits SVGs and warns on missing sections") {
    fs::path dir = fs::temp_directory_path() / "idf_cli_plot";
    fs::remove_all(dir);
    fs::create_directories(dir / "out" / "report");
    // only a psycho section present
    write_file(dir / "out" / "report" / "psycho_fits.csv",
               "participant,a,b,pse,dt,converged,status\np1,-1.2,4.1,3.41,4.33,1,ok\n");
    int rc = run("plot --out " + (dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out" / "report" / "psychometric_curves.svg"));
    CHECK_FALSE(fs::exists(dir / "out" / "report" / "crr_vs_sigma.svg"));

    // well-formed XML: crude check for the closing tag
    std::string svg = slurp(dir / "out" / "report" / "psychometric_curves.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    fs::remove_all(dir);
}
