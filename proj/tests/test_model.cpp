#include "oracles.hpp"

#include "rtd/datasets.hpp"
#include "rtd/errors.hpp"
#include "rtd/grad.hpp"
#include "rtd/model.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace rtd;

namespace {

double total_loss(const MlpParams& p, const PointCloud& batch, double lambda) {
    return loss_and_gradient(p, batch, lambda).loss.total;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("shapes and parameter count") {
    const auto p = MlpParams::init(5, 16, 3, 2, 1);
    REQUIRE(p.encoder.size() == 3);
    REQUIRE(p.decoder.size() == 3);
    CHECK(p.encoder[0].weight.rows() == 16);
    CHECK(p.encoder[0].weight.cols() == 5);
    CHECK(p.encoder[2].weight.rows() == 2);
    CHECK(p.decoder[0].weight.cols() == 2);
    CHECK(p.decoder[2].weight.rows() == 5);
    const std::size_t per_side = (5 * 16 + 16) + (16 * 16 + 16) + (16 * 2 + 2);
    const std::size_t other_side = (2 * 16 + 16) + (16 * 16 + 16) + (16 * 5 + 5);
    CHECK(p.parameter_count() == per_side + other_side);
    CHECK(p.flatten().size() == p.parameter_count());

    const auto single = MlpParams::init(4, 8, 1, 2, 1);
    CHECK(single.encoder.size() == 1);
    CHECK(single.encoder[0].weight.cols() == 4);
    CHECK(single.encoder[0].weight.rows() == 2);
}

TEST_CASE("init is seeded and bounded") {
    const auto a = MlpParams::init(3, 8, 2, 2, 5);
    const auto b = MlpParams::init(3, 8, 2, 2, 5);
    const auto c = MlpParams::init(3, 8, 2, 2, 6);
    CHECK(a.flatten() == b.flatten());
    CHECK(a.flatten() != c.flatten());
    const double bound = 1.0 / std::sqrt(3.0);
    CHECK(a.encoder[0].weight.cwiseAbs().maxCoeff() <= bound);
    CHECK(a.encoder[0].bias.cwiseAbs().maxCoeff() <= bound);
}

TEST_CASE("flatten and assign") {
    auto p = MlpParams::init(3, 4, 2, 2, 1);
    const auto flat = p.flatten();
    auto q = MlpParams::zeros(3, 4, 2, 2);
    q.assign(flat);
    CHECK(q.flatten() == flat);
    // weights row-major then bias, encoder first
    CHECK(flat[0] == p.encoder[0].weight(0, 0));
    CHECK(flat[1] == p.encoder[0].weight(0, 1));
    CHECK(flat[12] == p.encoder[0].bias(0));
    CHECK_THROWS_AS(q.assign(std::vector<double>(3)), InputError);
    CHECK_THROWS_AS(MlpParams::zeros(0, 4, 2, 2), InputError);
}

TEST_CASE("forward by hand") {
    auto p = MlpParams::zeros(2, 3, 2, 1);
    p.encoder[0].weight << 1, 0, 0, 1, 1, 1;
    p.encoder[0].bias << 0, 0.5, 0;
    p.encoder[1].weight << 1, -1, 2;
    p.encoder[1].bias << 0.25;
    p.decoder[0].weight << 1, 2, 3;
    p.decoder[1].weight << 1, 0, 0, 0, 1, 0;
    RowMatrix x(1, 2);
    x << 0.3, -0.2;
    const auto r = forward(p, PointCloud(x));
    const double h0 = std::tanh(0.3);
    const double h1 = std::tanh(-0.2 + 0.5);
    const double h2 = std::tanh(0.1);
    const double z = h0 - h1 + 2 * h2 + 0.25;
    CHECK(r.latent(0, 0) == doctest::Approx(z).epsilon(1e-14));
    CHECK(r.reconstruction(0, 0) == doctest::Approx(std::tanh(z)).epsilon(1e-14));
    CHECK(r.reconstruction(0, 1) == doctest::Approx(std::tanh(2 * z)).epsilon(1e-14));
    CHECK(encode(p, PointCloud(x)).points() == r.latent.points());
}

TEST_CASE("reconstruction gradient matches central differences") {
    const auto p = MlpParams::init(3, 6, 3, 2, 11);
    const PointCloud batch(oracle::random_points(12, 3, 12));
    const auto lg = loss_and_gradient(p, batch, 0.0);
    auto flat = p.flatten();
    double worst = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        auto probe = [&](double h) {
            auto q = p;
            auto f = flat;
            f[i] += h;
            q.assign(f);
            return total_loss(q, batch, 0.0);
        };
        const double fd = oracle::central_difference(probe, 1e-6);
        worst = std::max(worst, std::abs(fd - lg.grad[i]) / std::max(std::abs(fd), 1e-4));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("total gradient with the rtd term") {
    const auto p = MlpParams::init(3, 6, 3, 2, 21);
    const PointCloud batch(oracle::random_points(12, 3, 22));
    const auto lg = loss_and_gradient(p, batch, 1.0);
    REQUIRE(!lg.rtd_skipped);
    CHECK(lg.loss.rtd > 0.0);
    auto flat = p.flatten();
    auto routing = [&](const std::vector<double>& f) {
        auto q = p;
        q.assign(f);
        const auto z = encode(q, batch);
        return std::make_pair(route_cross_barcode(batch, z), route_cross_barcode(z, batch));
    };
    int compared = 0;
    int good = 0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double h = 1e-6;
        auto plus = flat;
        auto minus = flat;
        plus[i] += h;
        minus[i] -= h;
        if (routing(plus) != routing(minus)) continue;
        auto q = p;
        q.assign(plus);
        const double fp = total_loss(q, batch, 1.0);
        q.assign(minus);
        const double fm = total_loss(q, batch, 1.0);
        const double fd = (fp - fm) / (2 * h);
        ++compared;
        if (std::abs(fd - lg.grad[i]) / std::max(std::abs(fd), 1e-4) <= 1e-3) ++good;
    }
    CHECK(compared > static_cast<int>(flat.size()) / 2);
    CHECK(good == compared);
}

TEST_CASE("min+max variant adds the max term") {
    const auto p = MlpParams::init(3, 6, 2, 2, 31);
    const PointCloud batch(oracle::random_points(10, 3, 32));
    const auto a = loss_and_gradient(p, batch, 1.0, RtdLossVariant::Min);
    const auto b = loss_and_gradient(p, batch, 1.0, RtdLossVariant::MinPlusMax);
    const auto z = encode(p, batch);
    CHECK(b.loss.rtd == doctest::Approx(a.loss.rtd + rtd::rtd(batch, z, CrossVariant::Max)));
    CHECK(a.loss.reconstruction == b.loss.reconstruction);
}

TEST_CASE("config validation and names") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.learning_rate = -1;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.lambda = -0.5;
    CHECK_THROWS_AS(c.validate(), InputError);
    CHECK(parse_optimizer("adam") == OptimizerKind::Adam);
    CHECK(to_string(OptimizerKind::Sgd) == "sgd");
    CHECK(parse_rtd_variant(to_string(RtdLossVariant::MinPlusMax)) == RtdLossVariant::MinPlusMax);
    CHECK_THROWS_AS(parse_optimizer("rmsprop"), InputError);
}

TEST_CASE("training") {
    const auto data = make_circle(40, 1);
    TrainConfig c;
    c.batch_size = 16;
    c.epochs_total = 12;
    c.rtd_start_epoch = 6;
    c.seed = 3;

    SUBCASE("reconstruction decreases early on") {
        // default config, seed-averaged
        for (const auto name : {DatasetName::Circle, DatasetName::Clusters2, DatasetName::Random}) {
            std::vector<double> mean(10, 0.0);
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                DatasetSpec spec;
                spec.name = name;
                spec.seed = seed;
                TrainConfig r;
                r.lambda = 0.0;
                r.epochs_total = 10;
                r.rtd_start_epoch = 10;
                r.seed = seed;
                const auto res = train(generate(spec), r);
                REQUIRE(res.history.size() == 10);
                for (std::size_t e = 0; e < 10; ++e) mean[e] += res.history[e].reconstruction / 3.0;
            }
            for (std::size_t e = 1; e < 10; ++e) CHECK(mean[e] < mean[e - 1]);
        }
    }
    SUBCASE("two phases") {
        const auto res = train(data, c);
        REQUIRE(res.history.size() == 12);
        for (const auto& h : res.history) {
            if (h.epoch < 6) {
                CHECK(h.rtd == 0.0);
            } else {
                CHECK(h.rtd > 0.0);
            }
        }
    }
    SUBCASE("deterministic") {
        c.optimizer = OptimizerKind::Adam;
        const auto a = train(data, c);
        const auto b = train(data, c);
        CHECK(a.history == b.history);
        CHECK(a.params.flatten() == b.params.flatten());
    }
}

TEST_CASE("checkpoint round trip") {
    TrainConfig c;
    c.optimizer = OptimizerKind::Adam;
    c.rtd_variant = RtdLossVariant::MinPlusMax;
    c.seed = 77;
    c.lambda = 0.25;
    const auto p = MlpParams::init(4, 8, 3, 2, 9);
    const auto path = temp_path("rtd_ckpt_test.json");
    save_checkpoint(path, p, c);
    TrainConfig back;
    const auto q = load_checkpoint(path, &back);
    CHECK(q.flatten() == p.flatten());
    CHECK(back.optimizer == OptimizerKind::Adam);
    CHECK(back.rtd_variant == RtdLossVariant::MinPlusMax);
    CHECK(back.seed == 77);
    CHECK(back.lambda == 0.25);

    {
        std::ofstream out(path);
        out << "{\"format\": \"something else\"}";
    }
    CHECK_THROWS_AS(load_checkpoint(path), InputError);
    {
        std::ofstream out(path);
        out << "not json";
    }
    CHECK_THROWS_AS(load_checkpoint(path), InputError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_checkpoint(path), InputError);
}

}
