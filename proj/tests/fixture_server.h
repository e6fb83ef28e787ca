// Local HTTP server with canned MediaWiki and SPARQL answers.
#ifndef LODCOV_TESTS_FIXTURE_SERVER_H_
#define LODCOV_TESTS_FIXTURE_SERVER_H_

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>

class FixtureServer {
 public:
  // Requests to a path fail with 503 until they have been seen `flaky_failures` times.
  explicit FixtureServer(int flaky_failures = 0, std::chrono::milliseconds latency = {})
      : flaky_failures_(flaky_failures), latency_(latency) {
    server_.new_task_queue = [] { return new httplib::ThreadPool(16); };
    server_.Get(R"(/(\w+)/w/api\.php)", [this](const httplib::Request &req, httplib::Response &res) {
      Guard g(this);
      std::string lang = req.matches[1];
      if (lang == "missing") {
        res.status = 404;
        return;
      }
      if (lang == "nosite") {
        res.set_content(R"({"error":{"code":"missingsite","info":"no such wiki"}})",
                        "application/json");
        return;
      }
      if (lang == "broken") {
        res.status = 500;
        return;
      }
      std::uint64_t articles = lang == "en" ? 6900000 : 1000 + lang.size();
      res.set_content(R"({"batchcomplete":"","query":{"statistics":{"pages":1,"articles":)" +
                          std::to_string(articles) + "}}}",
                      "application/json");
    });
    server_.Get("/sparql", [this](const httplib::Request &req, httplib::Response &res) {
      Guard g(this);
      std::string q = req.get_param_value("query");
      last_accept_ = req.get_header_value("Accept");
      std::string value = "42";
      if (q.find("\"zero\"") != std::string::npos) value = "0";
      if (q.find("RELATIONS") != std::string::npos) value = "7";
      std::string bindings = R"([{"count":{"type":"literal","datatype":"http://www.w3.org/2001/XMLSchema#integer","value":")" +
                             value + "\"}}]";
      if (q.find("\"none\"") != std::string::npos) bindings = "[]";
      res.set_content(R"({"head":{"vars":["count"]},"results":{"bindings":)" + bindings + "}}",
                      "application/sparql-results+json");
    });
    server_.Get("/flaky", [this](const httplib::Request &, httplib::Response &res) {
      Guard g(this);
      res.set_content("ok", "text/plain");
    });
    server_.set_pre_routing_handler([this](const httplib::Request &req, httplib::Response &res) {
      std::lock_guard<std::mutex> lock(mu_);
      int seen = ++hits_[req.path];
      if (seen <= flaky_failures_) {
        res.status = 503;
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }

  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int max_in_flight() const { return max_in_flight_; }
  int hits(const std::string &path) {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_[path];
  }
  int total_hits() {
    std::lock_guard<std::mutex> lock(mu_);
    int n = 0;
    for (const auto &[p, c] : hits_) n += c;
    return n;
  }
  std::string last_accept() {
    std::lock_guard<std::mutex> lock(mu_);
    return last_accept_;
  }

 private:
  struct Guard {
    explicit Guard(FixtureServer *s) : s(s) {
      int now = ++s->in_flight_;
      int prev = s->max_in_flight_.load();
      while (now > prev && !s->max_in_flight_.compare_exchange_weak(prev, now)) {
      }
      if (s->latency_.count() > 0) std::this_thread::sleep_for(s->latency_);
    }
    ~Guard() { --s->in_flight_; }
    FixtureServer *s;
  };

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int flaky_failures_;
  std::chrono::milliseconds latency_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::mutex mu_;
  std::map<std::string, int> hits_;
  std::string last_accept_;
};

#endif  // LODCOV_TESTS_FIXTURE_SERVER_H_
