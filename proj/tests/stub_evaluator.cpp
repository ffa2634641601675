// Scripted evaluator speaking the newline-delimited JSON protocol, for tests.
//
//   stub_evaluator --mode costs --costs 0.1343,0.2   cycle through fixed costs
//   stub_evaluator --mode synthetic                  score (layers, neurons)
//   stub_evaluator --mode bad-type|bad-id|garbage|hang|exit|inf|accuracy
//   --log <file>   append every request line to <file>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

int main(int argc, char** argv) {
    std::string mode = "costs";
    std::vector<double> costs{0.5};
    std::string log_path;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const std::string value = argv[i + 1];
        if (flag == "--mode") {
            mode = value;
        } else if (flag == "--costs") {
            costs.clear();
            std::stringstream ss(value);
            for (std::string item; std::getline(ss, item, ',');) costs.push_back(std::stod(item));
        } else if (flag == "--log") {
            log_path = value;
        }
    }
    if (mode == "exit") return 3;

    std::size_t served = 0;
    for (std::string line; std::getline(std::cin, line);) {
        if (!log_path.empty()) std::ofstream(log_path, std::ios::app) << line << "\n";
        const auto request = nlohmann::json::parse(line);
        const auto id = request.at("id").get<long long>();

        if (mode == "hang") {
            std::this_thread::sleep_for(std::chrono::hours(1));
        } else if (mode == "bad-type") {
            std::cout << R"({"id": )" << id << R"(, "cost": "abc"})" << std::endl;
        } else if (mode == "bad-id") {
            std::cout << R"({"id": )" << id + 1 << R"(, "cost": 0.5})" << std::endl;
        } else if (mode == "garbage") {
            std::cout << "not json at all" << std::endl;
        } else if (mode == "inf") {
            std::cout << R"({"id": )" << id << R"(, "cost": 1e999})" << std::endl;
        } else if (mode == "accuracy") {
            std::cout << R"({"id": )" << id << R"(, "accuracy": 0.8626})" << std::endl;
        } else if (mode == "synthetic") {
            const auto& c = request.at("candidate");
            const double layers = c.at("layers").get<double>();
            const double neurons = c.at("neurons").get<double>();
            const double s = std::sin(std::numbers::pi * neurons / 20.0);
            const double cost = 0.13 + 0.01 * std::pow(layers - 3.0, 2) / 9.0 +
                                0.01 * std::pow((neurons - 120.0) / 200.0, 2) + 0.002 * s * s;
            nlohmann::json reply{{"id", id}, {"cost", cost}};
            std::cout << reply.dump() << std::endl;
        } else {
            nlohmann::json reply{{"id", id}, {"cost", costs[served % costs.size()]}};
            std::cout << reply.dump() << std::endl;
        }
        ++served;
    }
    return 0;
}
