#pragma once

// Shared helpers for the test binaries: independent reference formulas and a
// local HTTP stub server.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>

namespace llmpso::testing {

/// Direct transcription of the synthetic landscape, kept apart from the library.
inline double synthetic_reference(int layers, int neurons) {
    return 0.13 + 0.01 * ((layers - 3) * (layers - 3)) / 9.0 +
           0.01 * std::pow((neurons - 120) / 200.0, 2) +
           0.002 * std::pow(std::sin(std::numbers::pi * neurons / 20.0), 2);
}

inline double rastrigin_reference(double x, double y) {
    const double two_pi = 2.0 * std::numbers::pi;
    return 20.0 + (x * x - 10.0 * std::cos(two_pi * x)) + (y * y - 10.0 * std::cos(two_pi * y));
}

/// Student-t density.
inline double t_pdf(double t, double dof) {
    const double c = std::exp(std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0)) /
                     std::sqrt(dof * std::numbers::pi);
    return c * std::pow(1.0 + t * t / dof, -(dof + 1.0) / 2.0);
}

/// P(0 < T < t) by composite Simpson.
inline double t_central_mass(double t, double dof, int intervals = 4000) {
    const double h = t / intervals;
    double sum = t_pdf(0.0, dof) + t_pdf(t, dof);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * t_pdf(i * h, dof);
    return sum * h / 3.0;
}

/// t(0.975, dof) by bisection on the integrated density.
inline double t975_reference(double dof) {
    double lo = 0.0;
    double hi = 100.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_central_mass(mid, dof) < 0.475) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// httplib server on an ephemeral localhost port, stopped on destruction.
class HttpStub {
public:
    explicit HttpStub(const std::function<void(httplib::Server&)>& routes) {
        routes(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~HttpStub() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }
    HttpStub(const HttpStub&) = delete;
    HttpStub& operator=(const HttpStub&) = delete;

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace llmpso::testing
