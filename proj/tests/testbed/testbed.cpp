// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "testbed.hpp"

#include <charconv>
#include <optional>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace wfc::testbed {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

const std::map<std::string, std::string> kFormUsers = {{"admin", "admin"}, {"user1", "password"}};
const std::map<std::string, std::string> kTokenUsers = {{"admin", "bar123"}, {"user", "bar123"}};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

std::optional<long> parse_id(const std::string& text) {
  long value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::string> cookie_value(const httplib::Request& req, const std::string& name) {
  auto header = req.get_header_value("Cookie");
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto end = header.find(';', pos);
    if (end == std::string::npos) end = header.size();
    auto pair = header.substr(pos, end - pos);
    while (!pair.empty() && pair.front() == ' ') pair.erase(pair.begin());
    auto eq = pair.find('=');
    if (eq != std::string::npos && pair.substr(0, eq) == name) return pair.substr(eq + 1);
    pos = end + 1;
  }
  return std::nullopt;
}

bool authorized(const httplib::Request& req) {
  auto bearer = req.get_header_value("Authorization");
  for (const auto& [user, password] : kTokenUsers) {
    if (bearer == "Bearer tok-" + user) return true;
  }
  if (auto session = cookie_value(req, "SESSION")) {
    for (const auto& [user, password] : kFormUsers) {
      if (*session == "sess-" + user) return true;
    }
  }
  return false;
}

// Empty when the item body is acceptable.
std::string item_problem(const json& body) {
  if (!body.is_object()) return "body must be an object";
  auto name = body.find("name");
  if (name == body.end()) return "name is required";
  if (!name->is_string()) return "name must be a string";
  auto length = name->get<std::string>().size();
  if (length < 1 || length > 20) return "name length out of range";
  if (auto price = body.find("price"); price != body.end()) {
    if (!price->is_number()) return "price must be a number";
    double p = price->get<double>();
    if (p < 0 || p > 1000) return "price out of range";
  }
  return {};
}

}  // namespace

Testbed::Testbed() = default;

Testbed::~Testbed() { stop(); }

std::string Testbed::origin() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::size_t Testbed::hits(const std::string& path) const {
  std::lock_guard lock(mutex_);
  auto it = hits_.find(path);
  return it == hits_.end() ? 0 : it->second;
}

void Testbed::reset() {
  std::lock_guard lock(mutex_);
  items_.clear();
  hits_.clear();
  next_id_ = 5000;
}

void Testbed::start(int port) {
  if (server_) throw std::logic_error("testbed already running");
  reset();
  server_ = std::make_unique<httplib::Server>();
  server_->set_tcp_nodelay(true);
  server_->set_keep_alive_timeout(1);
  install_routes();
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    port_ = server_->bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) {
    server_.reset();
    throw std::runtime_error("testbed cannot bind");
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Testbed::stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

void Testbed::install_routes() {
  auto& s = *server_;

  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response&) {
    std::lock_guard lock(mutex_);
    ++hits_[req.path];
    return httplib::Server::HandlerResponse::Unhandled;
  });

  s.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content("wfc testbed\n", "text/plain"); });
  s.Get("/openapi.json", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(openapi_v3_document(), kJson);
  });
  s.Get("/openapi-v2.json", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(openapi_v2_document(), kJson);
  });

  s.Post("/login", [](const httplib::Request& req, httplib::Response& res) {
    httplib::Params form;
    httplib::detail::parse_query_text(req.body, form);
    auto user = form.find("username");
    auto password = form.find("password");
    if (user == form.end() || password == form.end()) return send_json(res, 400, {{"error", "missing credentials"}});
    auto known = kFormUsers.find(user->second);
    if (known == kFormUsers.end() || known->second != password->second) {
      return send_json(res, 401, {{"error", "bad credentials"}});
    }
    res.set_header("Set-Cookie", "SESSION=sess-" + user->second + "; Path=/; HttpOnly");
    send_json(res, 200, {{"user", user->second}});
  });

  s.Post("/api/auth/signin", [](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (!body.is_object() || !body.contains("usernameOrEmail") || !body.contains("password")) {
      return send_json(res, 400, {{"error", "missing credentials"}});
    }
    auto user = body["usernameOrEmail"].is_string() ? body["usernameOrEmail"].get<std::string>() : "";
    auto password = body["password"].is_string() ? body["password"].get<std::string>() : "";
    auto known = kTokenUsers.find(user);
    if (known == kTokenUsers.end() || known->second != password) {
      return send_json(res, 401, {{"error", "bad credentials"}});
    }
    send_json(res, 200, {{"accessToken", "tok-" + user}, {"tokenType", "Bearer"}});
  });

  auto item_json = [](const Item& item) { return json{{"id", item.id}, {"name", item.name}, {"price", item.price}}; };

  s.Get("/api/v3/items", [this, item_json](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return send_json(res, 401, {{"error", "unauthorized"}});
    std::lock_guard lock(mutex_);
    json out = json::array();
    for (const auto& [id, item] : items_) out.push_back(item_json(item));
    send_json(res, 200, out);
  });

  s.Post("/api/v3/items", [this, item_json](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return send_json(res, 401, {{"error", "unauthorized"}});
    json body = json::parse(req.body, nullptr, false);
    if (auto problem = item_problem(body); !problem.empty()) return send_json(res, 400, {{"error", problem}});
    std::lock_guard lock(mutex_);
    Item item{next_id_++, body["name"].get<std::string>(), body.value("price", 0.0)};
    items_[item.id] = item;
    res.set_header("Location", "/api/v3/items/" + std::to_string(item.id));
    send_json(res, 201, item_json(item));
  });

  s.Get(R"(/api/v3/items/([^/]+))", [this, item_json](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return send_json(res, 401, {{"error", "unauthorized"}});
    auto id = parse_id(req.matches[1]);
    if (!id) return send_json(res, 400, {{"error", "id must be an integer"}});
    std::lock_guard lock(mutex_);
    auto it = items_.find(*id);
    if (it == items_.end()) return send_json(res, 404, {{"error", "no such item"}});
    send_json(res, 200, item_json(it->second));
  });

  s.Put(R"(/api/v3/items/([^/]+))", [this, item_json](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return send_json(res, 401, {{"error", "unauthorized"}});
    auto id = parse_id(req.matches[1]);
    if (!id) return send_json(res, 400, {{"error", "id must be an integer"}});
    json body = json::parse(req.body, nullptr, false);
    if (auto problem = item_problem(body); !problem.empty()) return send_json(res, 400, {{"error", problem}});
    std::lock_guard lock(mutex_);
    auto it = items_.find(*id);
    if (it == items_.end()) return send_json(res, 404, {{"error", "no such item"}});
    it->second.name = body["name"].get<std::string>();
    it->second.price = body.value("price", it->second.price);
    send_json(res, 200, item_json(it->second));
  });

  s.Delete(R"(/api/v3/items/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return send_json(res, 401, {{"error", "unauthorized"}});
    auto id = parse_id(req.matches[1]);
    if (!id) return send_json(res, 400, {{"error", "id must be an integer"}});
    std::lock_guard lock(mutex_);
    if (items_.erase(*id) == 0) return send_json(res, 404, {{"error", "no such item"}});
    res.status = 204;
  });

  s.Get(R"(/api/v3/tags/([^/]+))", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 500, {{"message", "tag lookup failed: repository unavailable"}});
  });

  s.Get("/api/v3/teapot", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 418, {{"message", "short and stout"}});
  });

  s.Get("/api/v3/broken", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"name", "widget"}});
  });

  s.Get("/api/v3/pets/findByStatus", [](const httplib::Request& req, httplib::Response& res) {
    auto status = req.has_param("status") ? req.get_param_value("status") : std::string("available");
    send_json(res, 200, json::array({{{"id", 1}, {"name", "rex"}, {"status", status}}}));
  });

  s.Get("/api/v3/legacy", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"ok", true}});
  });
}

std::string openapi_v3_document() {
  return R"JSON({
  "openapi": "3.0.3",
  "info": {"title": "wfc testbed", "version": "1.0.0"},
  "servers": [{"url": "/api/v3"}],
  "components": {
    "securitySchemes": {
      "bearerAuth": {"type": "http", "scheme": "bearer"},
      "cookieAuth": {"type": "apiKey", "in": "cookie", "name": "SESSION"}
    },
    "schemas": {
      "ItemInput": {
        "type": "object",
        "required": ["name"],
        "properties": {
          "name": {"type": "string", "minLength": 1, "maxLength": 20},
          "price": {"type": "number", "minimum": 0, "maximum": 1000}
        }
      },
      "Item": {
        "type": "object",
        "required": ["id", "name"],
        "properties": {
          "id": {"type": "integer"},
          "name": {"type": "string"},
          "price": {"type": "number"}
        }
      },
      "Error": {"type": "object", "properties": {"error": {"type": "string"}}}
    },
    "responses": {
      "Unauthorized": {
        "description": "missing or bad credentials",
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "BadRequest": {
        "description": "invalid input",
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      },
      "NotFound": {
        "description": "no such item",
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
      }
    }
  },
  "paths": {
    "/items": {
      "get": {
        "security": [{"bearerAuth": []}, {"cookieAuth": []}],
        "responses": {
          "200": {
            "description": "all items",
            "content": {"application/json": {"schema": {"type": "array", "items": {"$ref": "#/components/schemas/Item"}}}}
          },
          "401": {"$ref": "#/components/responses/Unauthorized"}
        }
      },
      "post": {
        "security": [{"bearerAuth": []}, {"cookieAuth": []}],
        "requestBody": {
          "required": true,
          "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ItemInput"}}}
        },
        "responses": {
          "201": {
            "description": "created",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Item"}}}
          },
          "400": {"$ref": "#/components/responses/BadRequest"},
          "401": {"$ref": "#/components/responses/Unauthorized"}
        }
      }
    },
    "/items/{id}": {
      "parameters": [{"name": "id", "in": "path", "required": true, "schema": {"type": "integer"}}],
      "get": {
        "security": [{"bearerAuth": []}, {"cookieAuth": []}],
        "responses": {
          "200": {
            "description": "one item",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Item"}}}
          },
          "400": {"$ref": "#/components/responses/BadRequest"},
          "401": {"$ref": "#/components/responses/Unauthorized"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      },
      "put": {
        "security": [{"bearerAuth": []}, {"cookieAuth": []}],
        "requestBody": {
          "required": true,
          "content": {"application/json": {"schema": {"$ref": "#/components/schemas/ItemInput"}}}
        },
        "responses": {
          "200": {
            "description": "updated",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Item"}}}
          },
          "400": {"$ref": "#/components/responses/BadRequest"},
          "401": {"$ref": "#/components/responses/Unauthorized"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      },
      "delete": {
        "security": [{"bearerAuth": []}, {"cookieAuth": []}],
        "responses": {
          "204": {"description": "deleted"},
          "400": {"$ref": "#/components/responses/BadRequest"},
          "401": {"$ref": "#/components/responses/Unauthorized"},
          "404": {"$ref": "#/components/responses/NotFound"}
        }
      }
    },
    "/tags/{id}": {
      "get": {
        "parameters": [{"name": "id", "in": "path", "required": true, "schema": {"type": "integer", "minimum": 1}}],
        "responses": {
          "200": {
            "description": "one tag",
            "content": {"application/json": {"schema": {"type": "object", "properties": {"id": {"type": "integer"}}}}}
          }
        }
      }
    },
    "/teapot": {
      "get": {
        "responses": {
          "200": {"description": "never happens", "content": {"application/json": {"schema": {"type": "object"}}}}
        }
      }
    },
    "/broken": {
      "get": {
        "responses": {
          "200": {
            "description": "body misses a required field",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Item"}}}
          }
        }
      }
    },
    "/pets/findByStatus": {
      "get": {
        "parameters": [{
          "name": "status", "in": "query", "required": true,
          "schema": {"type": "string", "enum": ["available", "pending", "sold"]}
        }],
        "responses": {
          "200": {
            "description": "pets",
            "content": {"application/json": {"schema": {"type": "array", "items": {"type": "object"}}}}
          },
          "400": {"description": "invalid status"}
        }
      }
    },
    "/legacy": {
      "get": {
        "responses": {
          "200": {
            "description": "schema lost in a refactoring",
            "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Missing"}}}
          }
        }
      }
    }
  }
}
)JSON";
}

std::string openapi_v2_document() {
  return R"JSON({
  "swagger": "2.0",
  "info": {"title": "wfc testbed", "version": "1.0.0"},
  "basePath": "/api/v3",
  "produces": ["application/json"],
  "paths": {
    "/tags/{id}": {
      "get": {
        "parameters": [{"name": "id", "in": "path", "required": true, "type": "integer"}],
        "responses": {"200": {"description": "one tag", "schema": {"type": "object"}}}
      }
    },
    "/pets/findByStatus": {
      "get": {
        "parameters": [{"name": "status", "in": "query", "required": true, "type": "string",
                        "enum": ["available", "pending", "sold"]}],
        "responses": {"200": {"description": "pets", "schema": {"type": "array", "items": {"type": "object"}}}}
      }
    }
  }
}
)JSON";
}

std::string cookie_auth_yaml() {
  return R"YAML(auth:
  - name: ADMIN
    loginEndpointAuth:
      payloadRaw: "username=admin&password=admin"
  - name: user1
    loginEndpointAuth:
      payloadRaw: "username=user1&password=password"

authTemplate:
    loginEndpointAuth:
        endpoint: /login
        verb: POST
        contentType: application/x-www-form-urlencoded
        expectCookies: true
)YAML";
}

std::string token_auth_yaml() {
  return R"YAML(auth:
  - name: admin
    loginEndpointAuth:
      payloadRaw: "{\"usernameOrEmail\": \"admin\", \"password\": \"bar123\"}"
  - name: user
    loginEndpointAuth:
      payloadRaw: "{\"usernameOrEmail\": \"user\", \"password\": \"bar123\"}"

authTemplate:
    loginEndpointAuth:
        endpoint: /api/auth/signin
        verb: POST
        contentType: application/json
        token:
            extractFromField: /accessToken
            httpHeaderName: Authorization
            headerPrefix: "Bearer "
)YAML";
}

}  // namespace wfc::testbed
