#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "drtrack/commands.hpp"
#include "drtrack/synthetic.hpp"
#include "support.hpp"

using namespace drtrack;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the real executable so argument parsing and exit codes are covered.
Run cli(const testing::TempDir& tmp, const std::string& args) {
    const fs::path out = tmp.path() / "stdout.txt";
    const fs::path err = tmp.path() / "stderr.txt";
    const std::string cmd = quote(DRTRACK_CLI) + " " + args + " >" + quote(out.string()) + " 2>" + quote(err.string());
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

MotionSpec small(int frames) {
    MotionSpec spec;
    spec.frames = frames;
    return spec;
}

}  // namespace

TEST_CASE("track writes one box per frame, deterministically") {
    testing::TempDir tmp("track");
    const fs::path seq = tmp.path() / "moving";
    write_sequence(seq, make_moving_sequence("moving", small(10)));
    const std::string base = quote(seq.string()) + " --set use_cn=false --out ";

    const Run first = cli(tmp, "track " + base + quote((tmp.path() / "a").string()));
    REQUIRE(first.status == kExitOk);
    const std::string boxes = slurp(tmp.path() / "a" / "moving.txt");
    CHECK(count_lines(boxes) == 10);
    CHECK(boxes.substr(0, boxes.find('\n')) == "140.0000,100.0000,32.0000,32.0000");
    CHECK(fs::is_regular_file(tmp.path() / "a" / "timing.json"));
    CHECK_FALSE(fs::exists(tmp.path() / "a" / "overlay"));

    const Run second = cli(tmp, "track " + base + quote((tmp.path() / "b").string()) + " --overlay");
    REQUIRE(second.status == kExitOk);
    CHECK(slurp(tmp.path() / "b" / "moving.txt") == boxes);
    int images = 0;
    for (const auto& e : fs::directory_iterator(tmp.path() / "b" / "overlay"))
        images += e.path().extension() == ".png" ? 1 : 0;
    CHECK(images == 10);
}

TEST_CASE("usage and data errors map to exit codes") {
    testing::TempDir tmp("errors");
    const fs::path missing = tmp.path() / "no_such_dataset";
    const Run bench = cli(tmp, "bench " + quote(missing.string()) + " --out " + quote((tmp.path() / "o").string()));
    CHECK(bench.status == kExitData);
    CHECK(bench.err.find(missing.string()) != std::string::npos);

    const Run track = cli(tmp, "track " + quote(missing.string()) + " --out " + quote((tmp.path() / "o").string()));
    CHECK(track.status == kExitData);
    CHECK(track.err.find(missing.string()) != std::string::npos);

    CHECK(cli(tmp, "").status == kExitUsage);
    CHECK(cli(tmp, "frobnicate").status == kExitUsage);
    CHECK(cli(tmp, "bench " + quote(tmp.path().string())).status == kExitUsage);  // no --out
    CHECK(cli(tmp, "bench " + quote(tmp.path().string()) + " --out x --set nonsense").status == kExitUsage);

    fs::create_directories(tmp.path() / "ds");
    write_sequence(tmp.path() / "ds" / "s", make_static_sequence("s", small(4)));
    const Run bad_key = cli(tmp, "bench " + quote((tmp.path() / "ds").string()) + " --out " +
                                     quote((tmp.path() / "o").string()) + " --set lambda=2");
    CHECK(bad_key.status == kExitData);
    CHECK(bad_key.err.find("lambda") != std::string::npos);
}

TEST_CASE("bench reports every sequence plus a mean") {
    testing::TempDir tmp("bench");
    const fs::path ds = tmp.path() / "ds";
    write_sequence(ds / "moving", make_moving_sequence("moving", small(20)));
    write_sequence(ds / "static", make_static_sequence("static", small(20)));
    const std::string cfg = tmp.path() / "exp.cfg";
    std::ofstream(cfg) << "# gray + HOG only\nuse_cn = false\n";

    const auto run = [&](const std::string& out, const std::string& flags) {
        return cli(tmp, "bench " + quote(ds.string()) + " --config " + quote(cfg) + " --workers 2 --out " +
                            quote((tmp.path() / out).string()) + flags);
    };
    const Run full = run("full", "");
    REQUIRE(full.status == kExitOk);
    CHECK(count_lines(full.out) == 3);
    CHECK(full.out.find("mean:") != std::string::npos);
    for (const char* f : {"summary.json", "boxes/moving.txt", "boxes/static.txt", "curves/mean_precision.csv",
                          "curves/mean_success.csv", "curves/moving_precision.csv"})
        CHECK(fs::is_regular_file(tmp.path() / "full" / f));
    CHECK(count_lines(slurp(tmp.path() / "full" / "curves" / "mean_success.csv")) == 102);

    const Run again = run("again", "");
    REQUIRE(again.status == kExitOk);
    CHECK(slurp(tmp.path() / "again" / "boxes" / "moving.txt") == slurp(tmp.path() / "full" / "boxes" / "moving.txt"));

    const Run plain = run("plain", " --no-dr --no-ma");
    REQUIRE(plain.status == kExitOk);
    CHECK(slurp(tmp.path() / "plain" / "boxes" / "moving.txt") != slurp(tmp.path() / "full" / "boxes" / "moving.txt"));

    // library entry point: the flags are the same as the config toggles
    Config c = Config::parse("use_cn = false\nno_dr = true\nno_ma = true\n");
    const OpeReport lib = bench(ds, c, nullptr, 1);
    REQUIRE(lib.sequences[0].name == "moving");
    write_boxes(tmp.path() / "lib_moving.txt", lib.sequences[0].boxes);
    CHECK(slurp(tmp.path() / "lib_moving.txt") == slurp(tmp.path() / "plain" / "boxes" / "moving.txt"));
}

TEST_CASE("ablate emits four configurations") {
    testing::TempDir tmp("ablate");
    const fs::path ds = tmp.path() / "ds";
    write_sequence(ds / "moving", make_moving_sequence("moving", small(15)));
    const Run r = cli(tmp, "ablate " + quote(ds.string()) + " --set use_cn=false --workers 1 --out " +
                               quote((tmp.path() / "o").string()));
    REQUIRE(r.status == kExitOk);
    const std::string csv = slurp(tmp.path() / "o" / "ablation.csv");
    CHECK(csv == r.out);
    REQUIRE(count_lines(csv) == 5);
    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line))
        rows.push_back(line.substr(0, line.find(',', line.find(',', line.find(',') + 1) + 1)));
    CHECK(rows == std::vector<std::string>{"config,dr,ma", "full,1,1", "dr_only,1,0", "ma_only,0,1", "baseline,0,0"});

    // the baseline row is the --no-dr --no-ma run
    Config c;
    c.use_cn = false;
    const auto table = ablate(ds, c, nullptr, 1);
    c.no_dr = c.no_ma = true;
    const OpeReport plain = bench(ds, c, nullptr, 1);
    CHECK(table[3].precision20 == plain.mean_precision20);
    CHECK(table[3].auc == plain.mean_auc);
}

TEST_CASE("synth writes loadable sequences") {
    testing::TempDir tmp("synth");
    REQUIRE(cli(tmp, "synth moving --frames 5 --out " + quote((tmp.path() / "d").string())).status == kExitOk);
    const Sequence seq = load_sequence(tmp.path() / "d" / "moving");
    CHECK(seq.frames.size() == 5);
    CHECK(cli(tmp, "synth spiral --out " + quote((tmp.path() / "d").string())).status == kExitUsage);
}
