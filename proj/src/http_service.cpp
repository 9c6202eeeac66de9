#include "sba/http_service.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sba::http {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& detail) {
  reply(res, status, nlohmann::json{{"detail", detail}});
}

}  // namespace

struct NwdafServer::Impl {
  httplib::Server server;
  std::atomic<bool> pacing{false};
  std::thread pace_thread;
};

NwdafServer::NwdafServer(nwdaf::Runtime& runtime, ServeOptions options)
    : runtime_(runtime), options_(std::move(options)),
      impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;

  // Reuse addresses across restarts but keep the port exclusive, so a
  // second server on the same endpoint fails to bind instead of stealing
  // connections.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
               reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  svr.Get("/catalog", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, nwdaf::Runtime::service_catalog());
  });

  svr.Get("/nnwdaf-analyticsinfo/v1/analytics",
          [this](const httplib::Request& req, httplib::Response& res) {
            const std::string base = req.get_param_value("analytics-id");
            auto id = nwdaf::AnalyticsId::make(base, req.get_param_value("a"),
                                               req.get_param_value("b"));
            if (!id) {
              reply_error(res, 400, "unknown or incomplete analytics-id: " + base);
              return;
            }
            try {
              reply(res, 200, runtime_.analytics_info(*id).to_json());
            } catch (const nwdaf::NotFoundError& e) {
              reply_error(res, 404, e.what());
            }
          });

  svr.Post("/nnwdaf-eventssubscription/v1/subscriptions",
           [this](const httplib::Request& req, httplib::Response& res) {
             nlohmann::json body;
             try {
               body = nlohmann::json::parse(req.body);
             } catch (const nlohmann::json::exception& e) {
               reply_error(res, 400, e.what());
               return;
             }
             auto id = nwdaf::AnalyticsId::make(
                 body.value("analytics_id", ""), body.value("a", ""),
                 body.value("b", ""));
             if (!id) {
               reply_error(res, 400, "unknown or incomplete analytics_id");
               return;
             }
             nwdaf::AnalyticsSubscriptionRecord record;
             record.subscription_id = body.value("subscription_id", "");
             record.consumer = body.value("consumer", "");
             record.analytics = *id;
             record.cadence_s = body.value("cadence_s", 60.0);
             record.notify_target = body.value("notify_target", "");
             try {
               runtime_.analytics_subscribe(record);
               reply(res, 201,
                     nlohmann::json{{"subscription_id", record.subscription_id}});
             } catch (const nwdaf::ConflictError& e) {
               reply_error(res, 409, e.what());
             } catch (const std::invalid_argument& e) {
               reply_error(res, 400, e.what());
             }
           });

  svr.Delete(R"(/nnwdaf-eventssubscription/v1/subscriptions/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               try {
                 runtime_.analytics_unsubscribe(req.matches[1]);
                 res.status = 204;
               } catch (const nwdaf::NotFoundError& e) {
                 reply_error(res, 404, e.what());
               }
             });

  svr.Get(R"(/nnwdaf-eventssubscription/v1/subscriptions/([^/]+)/notifications)",
          [this](const httplib::Request& req, httplib::Response& res) {
            try {
              auto delivered = runtime_.notifications(req.matches[1]);
              auto items = nlohmann::json::array();
              for (const auto& n : delivered) {
                items.push_back({{"subscription_id", n.subscription_id},
                                 {"seq", n.seq},
                                 {"at_s", n.at_s},
                                 {"report", n.report.to_json()}});
              }
              reply(res, 200, nlohmann::json{{"notifications", std::move(items)}});
            } catch (const nwdaf::NotFoundError& e) {
              reply_error(res, 404, e.what());
            }
          });

  svr.Post("/nnwdaf-datamanagement/v1/subscriptions",
           [this](const httplib::Request& req, httplib::Response& res) {
             nlohmann::json body;
             try {
               body = nlohmann::json::parse(req.body);
             } catch (const nlohmann::json::exception& e) {
               reply_error(res, 400, e.what());
               return;
             }
             nwdaf::DmFilter filter;
             if (body.contains("filter")) {
               const auto& f = body.at("filter");
               if (f.contains("src")) filter.src = f.at("src").get<std::string>();
               if (f.contains("dst")) filter.dst = f.at("dst").get<std::string>();
               if (f.contains("protocol")) {
                 filter.protocol =
                     Protocol::parse(f.at("protocol").get<std::string>());
               }
             }
             auto result = runtime_.data_management_subscribe(
                 body.value("consumer", ""), filter,
                 body.value("historical", false),
                 body.value("notify_target", ""));
             reply(res, result.updated_existing ? 200 : 201,
                   nlohmann::json{{"subscription_id", result.subscription_id},
                                  {"updated_existing", result.updated_existing},
                                  {"replay", result.replay}});
           });

  svr.Delete(R"(/nnwdaf-datamanagement/v1/subscriptions/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               try {
                 runtime_.data_management_unsubscribe(req.matches[1]);
                 res.status = 204;
               } catch (const nwdaf::NotFoundError& e) {
                 reply_error(res, 404, e.what());
               }
             });

  svr.Get(R"(/nnwdaf-datamanagement/v1/subscriptions/([^/]+)/pending)",
          [this](const httplib::Request& req, httplib::Response& res) {
            try {
              reply(res, 200,
                    nlohmann::json{
                        {"records", runtime_.data_management_pending(req.matches[1])}});
            } catch (const nwdaf::NotFoundError& e) {
              reply_error(res, 404, e.what());
            }
          });

  svr.Get("/nnwdaf-mlmodelprovision/v1/models",
          [](const httplib::Request&, httplib::Response& res) {
            reply(res, 501,
                  nwdaf::Runtime::ml_model_report("MLModelProvision").to_json());
          });
  svr.Get("/nnwdaf-mlmodelinfo/v1/models",
          [](const httplib::Request&, httplib::Response& res) {
            reply(res, 501,
                  nwdaf::Runtime::ml_model_report("MLModelInfo").to_json());
          });

  svr.Get("/nnrf-nfm/v1/nf-instances",
          [this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, runtime_.registry().debug_dump());
          });

  svr.Get("/sim/clock", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200,
          nlohmann::json{{"virtual_time_s", runtime_.now()},
                         {"duration_s", runtime_.duration_s()}});
  });

  svr.Post("/sim/advance",
           [this](const httplib::Request& req, httplib::Response& res) {
             nlohmann::json body = nlohmann::json::object();
             if (!req.body.empty()) {
               try {
                 body = nlohmann::json::parse(req.body);
               } catch (const nlohmann::json::exception& e) {
                 reply_error(res, 400, e.what());
                 return;
               }
             }
             double target;
             if (body.contains("to_s")) {
               target = body.at("to_s").get<double>();
             } else {
               target = runtime_.now() + body.value("seconds", 0.0);
             }
             runtime_.advance_to(target);
             reply(res, 200, nlohmann::json{{"virtual_time_s", runtime_.now()}});
           });

  svr.Post("/shutdown", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, nlohmann::json{{"stopping", true}});
    stop();
  });
}

NwdafServer::~NwdafServer() { stop(); }

bool NwdafServer::bind() {
  if (options_.port == 0) {
    bound_port_ = impl_->server.bind_to_any_port(options_.host);
    return bound_port_ > 0;
  }
  if (!impl_->server.bind_to_port(options_.host, options_.port)) return false;
  bound_port_ = options_.port;
  return true;
}

void NwdafServer::run() {
  if (options_.pace > 0) {
    impl_->pacing = true;
    impl_->pace_thread = std::thread([this] {
      using namespace std::chrono_literals;
      while (impl_->pacing) {
        std::this_thread::sleep_for(50ms);
        runtime_.advance_to(runtime_.now() + options_.pace * 0.05);
      }
    });
  }
  impl_->server.listen_after_bind();
}

void NwdafServer::stop() {
  if (impl_->pacing.exchange(false) && impl_->pace_thread.joinable()) {
    impl_->pace_thread.join();
  }
  impl_->server.stop();
}

}  // namespace sba::http
