#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "drtrack/error.hpp"
#include "drtrack/evaluation.hpp"
#include "drtrack/synthetic.hpp"
#include "support.hpp"

using namespace drtrack;
namespace fs = std::filesystem;

namespace {

std::vector<std::optional<BBox>> annotated(const std::vector<BBox>& boxes) {
    return {boxes.begin(), boxes.end()};
}

// Hand-written curves: a step at `from` (value before, value after).
std::vector<double> step(int n, int from, double before, double after) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = i < from ? before : after;
    return out;
}

void check_monotone(const std::vector<double>& precision, const std::vector<double>& success) {
    for (std::size_t i = 1; i < precision.size(); ++i)
        CHECK(precision[i] >= precision[i - 1]);
    for (std::size_t i = 1; i < success.size(); ++i)
        CHECK(success[i] <= success[i - 1]);
}

struct Pair {
    std::vector<BBox> pred;
    std::vector<BBox> gt;
};

Pair translated(int frames, double dx, double dy, double w = 30.0, double h = 30.0) {
    Pair p;
    for (int f = 0; f < frames; ++f) {
        const BBox g{50.0 + 2.0 * f, 40.0 + f, w, h};
        p.gt.push_back(g);
        p.pred.push_back({g.x + dx, g.y + dy, w, h});
    }
    return p;
}

class EchoTracker final : public SequenceTracker {
public:
    explicit EchoTracker(std::vector<BBox> gt) : gt_(std::move(gt)) {}
    void initialize(const Image&, const BBox&) override { frame_ = 0; }
    Output track(const Image&) override { return {gt_[++frame_], false}; }

private:
    std::vector<BBox> gt_;
    std::size_t frame_ = 0;
};

class StaticTracker final : public SequenceTracker {
public:
    void initialize(const Image&, const BBox& gt) override { box_ = gt; }
    Output track(const Image&) override { return {box_, false}; }

private:
    BBox box_;
};

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << text;
}

void write_frames(const fs::path& dir, int count) {
    fs::create_directories(dir / "img");
    for (int i = 0; i < count; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "%04d.png", i + 1);
        save_image(Image(8, 8, 1, static_cast<std::uint8_t>(10 * i)), dir / "img" / name);
    }
}

}  // namespace

TEST_CASE("metrics on constructed pairs") {
    const MetricOptions opts;

    SUBCASE("prediction equals groundtruth") {
        const Pair p = translated(6, 0.0, 0.0);
        const auto gt = annotated(p.gt);
        const auto prec = precision_curve(p.pred, gt, opts);
        const auto succ = success_curve(p.pred, gt, opts);
        CHECK(prec == step(51, 0, 1.0, 1.0));
        // IoU 1 is not > 1, so only the last sample drops.
        CHECK(succ.curve == step(101, 100, 1.0, 0.0));
        CHECK(succ.auc == 100.0 / 101.0);
        check_monotone(prec, succ.curve);
    }
    SUBCASE("every center 25 px off") {
        const Pair p = translated(5, 15.0, 20.0);  // 3-4-5 triangle, boxes still overlap
        const auto gt = annotated(p.gt);
        const auto prec = precision_curve(p.pred, gt, opts);
        CHECK(prec == step(51, 25, 0.0, 1.0));
        CHECK(prec[20] == 0.0);
        CHECK(prec[25] == 1.0);
        // overlap 15 x 10 of two 30 x 30 boxes
        const double overlap = 150.0 / (1800.0 - 150.0);
        const auto succ = success_curve(p.pred, gt, opts);
        int above = 0;
        for (int i = 0; i <= 100; ++i)
            above += overlap > i / 100.0 ? 1 : 0;
        CHECK(above == 10);  // 0.0909...
        CHECK(succ.curve == step(101, above, 1.0, 0.0));
        CHECK(succ.auc == above / 101.0);
        check_monotone(prec, succ.curve);

        const auto exclusive = precision_curve(p.pred, gt, {false, true});
        CHECK(exclusive[25] == 0.0);
        CHECK(exclusive[26] == 1.0);
    }
    SUBCASE("half exact, half 100 px away") {
        Pair p = translated(8, 0.0, 0.0);
        for (std::size_t f = 4; f < 8; ++f)
            p.pred[f].x += 100.0;
        const auto gt = annotated(p.gt);
        const auto prec = precision_curve(p.pred, gt, opts);
        CHECK(prec == step(51, 0, 0.5, 0.5));
        const auto succ = success_curve(p.pred, gt, opts);
        CHECK(succ.curve == step(101, 100, 0.5, 0.0));
        CHECK(succ.auc == 50.0 / 101.0);
        check_monotone(prec, succ.curve);
    }
    SUBCASE("disjoint boxes") {
        const Pair p = translated(4, 40.0, 0.0);
        const auto succ = success_curve(p.pred, annotated(p.gt), opts);
        CHECK(succ.curve == step(101, 0, 0.0, 0.0));
        CHECK(succ.auc == 0.0);
        // inclusive overlap at threshold 0 counts IoU 0
        CHECK(success_curve(p.pred, annotated(p.gt), {true, false}).curve[0] == 1.0);
    }
    SUBCASE("overlap one third") {
        const Pair p = translated(7, 15.0, 0.0);  // 15 of 30 px shared: 450 / 1350
        const auto gt = annotated(p.gt);
        for (std::size_t f = 0; f < p.gt.size(); ++f)
            CHECK(iou(p.pred[f], p.gt[f]) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        const auto succ = success_curve(p.pred, gt, opts);
        CHECK(succ.curve == step(101, 34, 1.0, 0.0));
        CHECK(succ.auc == 34.0 / 101.0);
        const auto prec = precision_curve(p.pred, gt, opts);
        CHECK(prec == step(51, 15, 0.0, 1.0));
        check_monotone(prec, succ.curve);
    }
}

TEST_CASE("missing annotations are excluded") {
    Pair p = translated(4, 0.0, 0.0);
    p.pred[1].x += 200.0;
    p.pred[3].x += 200.0;
    auto gt = annotated(p.gt);
    gt[1].reset();
    CHECK(precision_curve(p.pred, gt)[20] == doctest::Approx(2.0 / 3.0));
    gt[3].reset();
    CHECK(precision_curve(p.pred, gt)[20] == 1.0);

    std::vector<std::optional<BBox>> none(4);
    CHECK(precision_curve(p.pred, none)[20] == 0.0);
    CHECK(success_curve(p.pred, none).auc == 0.0);
}

TEST_CASE("length mismatch is rejected") {
    const Pair p = translated(3, 0.0, 0.0);
    const auto gt = annotated(std::vector<BBox>(p.gt.begin(), p.gt.begin() + 2));
    CHECK_THROWS_AS(precision_curve(p.pred, gt), ShapeError);
    CHECK_THROWS_AS(success_curve(p.pred, gt), ShapeError);
}

TEST_CASE("random curves: monotone, bounded, order-free") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> off(-40.0, 40.0);
    std::uniform_real_distribution<double> size(5.0, 60.0);
    for (int trial = 0; trial < 50; ++trial) {
        Pair p;
        for (int f = 0; f < 40; ++f) {
            const BBox g{100.0 + off(rng), 100.0 + off(rng), size(rng), size(rng)};
            p.gt.push_back(g);
            p.pred.push_back({g.x + off(rng), g.y + off(rng), size(rng), size(rng)});
        }
        const auto gt = annotated(p.gt);
        const auto prec = precision_curve(p.pred, gt);
        const auto succ = success_curve(p.pred, gt);
        check_monotone(prec, succ.curve);
        CHECK(prec[20] >= 0.0);
        CHECK(prec[20] <= 1.0);
        CHECK(succ.auc >= 0.0);
        CHECK(succ.auc <= 1.0);

        std::vector<std::size_t> order(p.gt.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        Pair q;
        for (std::size_t i : order) {
            q.gt.push_back(p.gt[i]);
            q.pred.push_back(p.pred[i]);
        }
        CHECK(precision_curve(q.pred, annotated(q.gt)) == prec);
        CHECK(success_curve(q.pred, annotated(q.gt)).curve == succ.curve);
    }
}

TEST_CASE("groundtruth lines") {
    const auto b = parse_box_line("10,20,30,40", 1);
    REQUIRE(b);
    CHECK(b->x == 10.0);
    CHECK(b->y == 20.0);
    CHECK(b->w == 30.0);
    CHECK(b->h == 40.0);
    CHECK(parse_box_line("10\t20\t30\t40", 1) == b);
    CHECK(parse_box_line("10 20 30 40\r", 1) == b);
    CHECK_FALSE(parse_box_line("NaN,NaN,NaN,NaN", 1));
    CHECK_FALSE(parse_box_line("", 1));
    try {
        parse_box_line("1,2,x,4", 7);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_box_line("1,2,3", 2), DataError);
}

TEST_CASE("sequence loading") {
    testing::TempDir tmp("load");
    const fs::path dir = tmp.path() / "seq";
    write_frames(dir, 3);
    write_text(dir / "groundtruth_rect.txt", "1,1,4,4\n2\t2\t4\t4\nNaN,NaN,NaN,NaN\n");
    write_text(dir / "attributes.txt", "OCC SV\n");

    const Sequence seq = load_sequence(dir);
    CHECK(seq.name == "seq");
    REQUIRE(seq.frames.size() == 3);
    CHECK(seq.frames[0].filename() == "0001.png");
    CHECK(seq.frames[2].filename() == "0003.png");
    REQUIRE(seq.groundtruth.size() == 3);
    CHECK(seq.groundtruth[1] == BBox{2.0, 2.0, 4.0, 4.0});
    CHECK_FALSE(seq.groundtruth[2]);
    CHECK(seq.attributes == std::set<std::string>{"OCC", "SV"});

    write_text(dir / "groundtruth_rect.txt", "1,1,4,4\n2,2,4,4\nbad line here x\n");
    try {
        load_sequence(dir);
        FAIL("expected a DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    fs::remove(dir / "groundtruth_rect.txt");
    CHECK_THROWS_AS(load_sequence(dir), DataError);

    const fs::path empty = tmp.path() / "empty";
    fs::create_directories(empty / "img");
    write_text(empty / "groundtruth_rect.txt", "1,1,4,4\n");
    CHECK_THROWS_AS(load_sequence(empty), DataError);
    CHECK_THROWS_AS(load_sequence(tmp.path() / "nowhere"), DataError);
}

TEST_CASE("one-pass evaluation") {
    MotionSpec spec;
    spec.frames = 25;
    const auto seq = make_moving_sequence("moving", spec);
    const auto gt = annotated(seq.groundtruth);
    const auto frame = [&](std::size_t i) { return seq.frames[i]; };

    const auto oracle = evaluate_frames("moving", seq.frames.size(), frame, gt,
                                        [&] { return std::make_unique<EchoTracker>(seq.groundtruth); }, {});
    CHECK(oracle.precision20 == 1.0);
    CHECK(oracle.auc == 100.0 / 101.0);
    CHECK(oracle.boxes == seq.groundtruth);

    const auto still = evaluate_frames("moving", seq.frames.size(), frame, gt,
                                       [] { return std::make_unique<StaticTracker>(); }, {});
    CHECK(still.precision20 < oracle.precision20);
    CHECK(still.auc < oracle.auc);
    CHECK(still.frames == 25);
    CHECK(still.seconds >= 0.0);
}

TEST_CASE("run_ope isolates failures and orders rows by name") {
    testing::TempDir tmp("ope");
    MotionSpec spec;
    spec.frames = 12;
    write_sequence(tmp.path() / "b_moving", make_moving_sequence("b_moving", spec));
    write_sequence(tmp.path() / "a_static", make_static_sequence("a_static", spec));
    fs::create_directories(tmp.path() / "c_broken" / "img");
    write_frames(tmp.path() / "c_broken", 2);  // no groundtruth file

    const Config config;
    const auto dirs = list_sequences(tmp.path(), config);
    REQUIRE(dirs.size() == 3);
    const TrackerFactory still = [] { return std::make_unique<StaticTracker>(); };
    const OpeReport rep = run_ope(still, dirs, config, 1);
    REQUIRE(rep.sequences.size() == 3);
    CHECK(rep.sequences[0].name == "a_static");
    CHECK(rep.sequences[1].name == "b_moving");
    CHECK(rep.sequences[2].name == "c_broken");
    CHECK_FALSE(rep.sequences[0].error);
    CHECK(rep.sequences[0].precision20 == 1.0);
    REQUIRE(rep.sequences[2].error);
    CHECK(rep.sequences[2].error->find("groundtruth") != std::string::npos);
    // the mean covers the two sequences that ran
    CHECK(rep.mean_precision20 == doctest::Approx((1.0 + rep.sequences[1].precision20) / 2.0));
    CHECK(rep.mean_precision.size() == 51);
    CHECK(rep.mean_success.size() == 101);

    // reversed input order and a worker pool give the same report
    std::vector<fs::path> reversed(dirs.rbegin(), dirs.rend());
    const OpeReport pooled = run_ope(still, reversed, config, 3);
    CHECK(summary_json(pooled, false) == summary_json(rep, false));
    CHECK(summary_json(rep, false).find("fps") == std::string::npos);
    CHECK(summary_json(rep, true).find("fps") != std::string::npos);

    write_report(tmp.path() / "out", rep);
    CHECK(fs::is_regular_file(tmp.path() / "out" / "summary.json"));
    CHECK(fs::is_regular_file(tmp.path() / "out" / "boxes" / "a_static.txt"));
    CHECK(fs::is_regular_file(tmp.path() / "out" / "curves" / "b_moving_success.csv"));
    CHECK_FALSE(fs::exists(tmp.path() / "out" / "boxes" / "c_broken.txt"));

    CHECK_THROWS_AS(list_sequences(tmp.path() / "absent", config), DataError);
}
