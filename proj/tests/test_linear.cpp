#include <doctest.h>

#include <cmath>
#include <vector>

#include "fadbio/eval.hpp"
#include "fadbio/learn/linear.hpp"
#include "fadbio/rng.hpp"
#include "oracles.hpp"

using namespace fadbio;

namespace {

struct Regression {
    std::size_t n = 0, p = 0;
    std::vector<double> x_col;  // column-major
    std::vector<double> y;
};

Regression random_regression(Rng& rng, std::size_t n, std::size_t p) {
    Regression d;
    d.n = n;
    d.p = p;
    d.x_col.resize(n * p);
    for (double& v : d.x_col) v = rng.uniform(-1.0, 1.0);
    std::vector<double> w(p);
    for (double& v : w) v = rng.uniform(-3.0, 3.0);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += d.x_col[j * n + i] * w[j];
        d.y[i] = s + rng.uniform(-0.1, 0.1);
    }
    return d;
}

// (X^T X / n + alpha I) w = X^T y / n, the stationarity condition of the
// ridge objective the coordinate solver minimizes at l1_ratio zero.
std::vector<double> ridge_closed_form(const Regression& d, double alpha) {
    const std::size_t n = d.n, p = d.p;
    std::vector<double> a(p * p, 0.0), b(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += d.x_col[j * n + i] * d.x_col[k * n + i];
            a[j * p + k] = s / static_cast<double>(n) + (j == k ? alpha : 0.0);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += d.x_col[j * n + i] * d.y[i];
        b[j] = s / static_cast<double>(n);
    }
    return oracle::solve_linear(std::move(a), std::move(b));
}

}  // namespace

TEST_CASE("coordinate descent at zero l1 matches the ridge closed form") {
    Rng rng(640100);
    for (double alpha : {0.05, 0.3, 1.0}) {
        const Regression d = random_regression(rng, 60, 4);
        const std::vector<double> w =
            elastic_net_cd(d.n, d.p, d.x_col, d.y, alpha, 0.0, 1e-12, 100000);
        const std::vector<double> ref = ridge_closed_form(d, alpha);
        REQUIRE(w.size() == d.p);
        for (std::size_t j = 0; j < d.p; ++j) {
            CHECK(w[j] == doctest::Approx(ref[j]).epsilon(1e-8));
        }
    }
}

TEST_CASE("a heavy lasso penalty empties the model") {
    Rng rng(911);
    const Regression d = random_regression(rng, 40, 5);
    const std::vector<double> w =
        elastic_net_cd(d.n, d.p, d.x_col, d.y, 1e6, 1.0, 1e-10, 10000);
    for (double v : w) CHECK(v == 0.0);
}

TEST_CASE("the single-feature lasso solves the soft threshold in closed form") {
    // x^T y / n = 5, x^T x / n = 2.5; at alpha 1, w = (5 - 1) / 2.5.
    const std::vector<double> x = {1.0, -1.0, 2.0, -2.0};
    const std::vector<double> y = {2.0, -2.0, 4.0, -4.0};
    const std::vector<double> w = elastic_net_cd(4, 1, x, y, 1.0, 1.0, 1e-12, 1000);
    CHECK(w[0] == doctest::Approx(1.6).epsilon(1e-12));

    // Warm starts land on the same solution.
    const std::vector<double> w2 = elastic_net_cd(4, 1, x, y, 1.0, 1.0, 1e-12, 1000, {7.0});
    CHECK(w2[0] == doctest::Approx(w[0]).epsilon(1e-10));
}

TEST_CASE("the multinomial gradient agrees with central differences") {
    Rng rng(271828);
    for (int k : {2, 3}) {
        const std::size_t n = 20, p = 3;
        std::vector<double> x(n * p);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        std::vector<int> y(n);
        for (int& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        const std::size_t dim = static_cast<std::size_t>(k) * (p + 1);
        std::vector<double> w(dim);
        for (double& v : w) v = rng.uniform(-0.5, 0.5);
        const double l2 = 0.1;

        std::vector<double> grad(dim, 0.0);
        multinomial_loss_grad(n, p, k, x, y, w, l2, grad);

        std::vector<double> probe = w;
        std::vector<double> scratch(dim);
        const double h = 1e-5;
        for (std::size_t j = 0; j < dim; ++j) {
            probe[j] = w[j] + h;
            const double up = multinomial_loss_grad(n, p, k, x, y, probe, l2, scratch);
            probe[j] = w[j] - h;
            const double down = multinomial_loss_grad(n, p, k, x, y, probe, l2, scratch);
            probe[j] = w[j];
            const double fd = (up - down) / (2.0 * h);
            CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("fitted linear models recover linear structure") {
    Rng rng(5150);
    DataTable t;
    t.feature_names = {"F0", "F1", "F2"};
    t.n = 90;
    t.p = 3;
    t.w_hours = 24;
    for (std::size_t i = 0; i < t.n; ++i) {
        const double x0 = rng.uniform(-1.0, 1.0);
        const double x1 = rng.uniform(-1.0, 1.0);
        const double x2 = rng.uniform(-1.0, 1.0);
        t.x.insert(t.x.end(), {x0, x1, x2});
        t.y.push_back(20.0 + 25.0 * x0 - 10.0 * x1 + rng.uniform(-0.5, 0.5));
        t.kind.push_back(EventKind::Set);
        t.event_id.push_back("E" + std::to_string(i));
        t.split.push_back(Split::Train);
        t.window_sum.push_back(0.0);
    }
    const DataView train = make_view(t, t.all_rows(), t.feature_names);

    const auto reg = fit_linear(Task::Regression, train, 99);
    const std::vector<double> pred = reg->predict_value(t, t.all_rows());
    double mae = 0.0;
    for (std::size_t i = 0; i < t.n; ++i) mae += std::fabs(pred[i] - t.y[i]);
    mae /= static_cast<double>(t.n);
    CHECK(mae < 1.5);

    // The same tonnage thresholded at ten makes an easy classifier.
    const auto cls = fit_linear(Task::Binary, train, 99);
    const std::vector<double> scores = cls->predict_scores(t, t.all_rows());
    std::vector<int> labels(t.n);
    for (std::size_t i = 0; i < t.n; ++i) {
        labels[i] = static_cast<int>(label_value(t.y[i], Task::Binary));
        CHECK(scores[i] >= 0.0);
        CHECK(scores[i] <= 1.0);
    }
    CHECK(roc_auc(scores, labels) > 0.95);

    const auto tern = fit_linear(Task::Ternary, train, 99);
    const std::vector<double> probs = tern->predict_scores(t, t.all_rows());
    REQUIRE(probs.size() == t.n * 3);
    for (std::size_t i = 0; i < t.n; ++i) {
        const double s = probs[i * 3] + probs[i * 3 + 1] + probs[i * 3 + 2];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }

    // The regression decision is the prediction itself.
    CHECK(reg->decision(t, t.all_rows()) == pred);
}
