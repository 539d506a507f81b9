#include "sdgame/server/service.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "sdgame/server/protocol.hpp"

namespace sdgame::server {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

class Connection;
class SessionHost;

struct Service::Impl : std::enable_shared_from_this<Service::Impl> {
    ServiceOptions options;
    net::io_context ioc;
    tcp::acceptor acceptor{ioc};
    std::vector<std::thread> threads;
    Clock::time_point epoch = Clock::now();
    std::atomic<ClientId> next_client{1};

    mutable std::mutex mu;
    std::vector<std::shared_ptr<SessionHost>> hosts;
    std::shared_ptr<SessionHost> lobby;
    std::size_t lobby_assigned = 0;

    explicit Impl(ServiceOptions o) : options(std::move(o)) {}

    void accept();
    void on_client_text(const std::shared_ptr<Connection>& conn, const std::string& text);
    std::shared_ptr<SessionHost> open_lobby();
    nlohmann::json health() const;
    std::int64_t now_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - epoch).count();
    }
};

// One session: the pure machine plus its log file, timer and clients, all
// touched only on the session strand.
class SessionHost : public std::enable_shared_from_this<SessionHost> {
public:
    SessionHost(Service::Impl& svc, SessionState state, const std::string& log_path)
        : svc_(svc), strand_(net::make_strand(svc.ioc)), timer_(strand_), state_(std::move(state)) {
        log_.open(log_path, std::ios::binary | std::ios::trunc);
        if (!log_) throw std::runtime_error("cannot open session log " + log_path);
        log_ << SessionLog::record_line(header_record(state_));
        log_.flush();
        publish();
    }

    const std::string& id() const { return state_.config.session_id; }

    void post(std::variant<ClientMessageEvent, ClientDisconnectEvent, TimerEvent> body,
              std::shared_ptr<Connection> conn = nullptr) {
        net::post(strand_, [self = shared_from_this(), body = std::move(body), conn = std::move(conn)]() mutable {
            if (conn) self->bind(conn);
            self->apply(std::move(body));
        });
    }

    Phase phase() const {
        std::lock_guard lock(meta_mu_);
        return phase_;
    }
    bool has_token(const std::string& token) const {
        std::lock_guard lock(meta_mu_);
        return tokens_.count(token) > 0;
    }
    std::size_t group_size() const { return state_.group_size(); }  // immutable after construction

private:
    void bind(const std::shared_ptr<Connection>& conn);
    void apply(std::variant<ClientMessageEvent, ClientDisconnectEvent, TimerEvent> body);

    void publish() {
        std::lock_guard lock(meta_mu_);
        phase_ = state_.phase;
        tokens_.clear();
        for (const auto& s : state_.seats)
            if (!s.bot) tokens_.insert(s.token);
    }

    Service::Impl& svc_;
    net::strand<net::io_context::executor_type> strand_;
    net::steady_timer timer_;
    SessionState state_;
    std::ofstream log_;
    std::map<ClientId, std::weak_ptr<Connection>> clients_;

    mutable std::mutex meta_mu_;
    Phase phase_ = Phase::Lobby;
    std::set<std::string> tokens_;
};

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(Service::Impl& svc, tcp::socket socket)
        : svc_(svc), stream_(std::move(socket)), id_(svc.next_client++) {}

    ClientId id() const { return id_; }
    std::shared_ptr<SessionHost> host() const { return host_; }
    void bind(std::shared_ptr<SessionHost> h) { host_ = std::move(h); }

    void start() {
        net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read_request(); });
    }

    void send(std::string text) {
        if (!ws_) return;
        net::post(ws_->get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
            self->outbox_.push_back(std::move(text));
            if (self->outbox_.size() == 1) self->write_next();
        });
    }

private:
    void read_request() {
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, request_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
    }

    void on_request(beast::error_code ec) {
        if (ec) return;
        if (websocket::is_upgrade(request_)) {
            stream_.expires_never();
            ws_ = std::make_unique<websocket::stream<beast::tcp_stream>>(std::move(stream_));
            ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            ws_->async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
                if (ec) return;
                self->read_frame();
            });
            return;
        }
        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(request_.version());
        res->keep_alive(false);
        if (request_.method() == http::verb::get && request_.target() == "/health") {
            res->result(http::status::ok);
            res->set(http::field::content_type, "application/json");
            res->body() = svc_.health().dump();
        } else {
            res->result(http::status::not_found);
            res->set(http::field::content_type, "application/json");
            res->body() = R"({"error":"not found"})";
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    void read_frame() {
        ws_->async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->closed();
                return;
            }
            auto text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->svc_.on_client_text(self, text);
            self->read_frame();
        });
    }

    void write_next() {
        ws_->text(true);
        ws_->async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->outbox_.clear();
                return;
            }
            self->outbox_.pop_front();
            if (!self->outbox_.empty()) self->write_next();
        });
    }

    void closed() {
        if (host_) host_->post(ClientDisconnectEvent{id_});
        spdlog::debug("client {} disconnected", id_);
    }

    Service::Impl& svc_;
    beast::tcp_stream stream_;
    std::unique_ptr<websocket::stream<beast::tcp_stream>> ws_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> request_;
    std::deque<std::string> outbox_;
    ClientId id_;
    std::shared_ptr<SessionHost> host_;  // touched on the connection strand only
};

void SessionHost::bind(const std::shared_ptr<Connection>& conn) { clients_[conn->id()] = conn; }

void SessionHost::apply(std::variant<ClientMessageEvent, ClientDisconnectEvent, TimerEvent> body) {
    if (const auto* d = std::get_if<ClientDisconnectEvent>(&body)) clients_.erase(d->client);
    const auto before = state_.phase;
    auto t = advance(std::move(state_), Event{svc_.now_ms(), std::move(body)});
    state_ = std::move(t.state);
    for (const auto& r : t.records) log_ << SessionLog::record_line(r);
    log_.flush();
    publish();
    for (const auto& m : t.messages) {
        auto it = clients_.find(m.client);
        if (it == clients_.end()) continue;
        if (auto c = it->second.lock()) c->send(m.message.dump());
    }
    if (t.timer) {
        const auto id = t.timer->id;
        timer_.expires_at(svc_.epoch + std::chrono::milliseconds(t.timer->due_ms));
        timer_.async_wait([self = shared_from_this(), id](beast::error_code ec) {
            if (!ec) self->apply(TimerEvent{id});
        });
    }
    if (before != state_.phase && state_.phase == Phase::Finished) {
        spdlog::info("session {} finished", id());
        timer_.cancel();
    }
}

std::shared_ptr<SessionHost> Service::Impl::open_lobby() {
    const auto index = hosts.size();
    const auto id = session_id(options.server.session.session_id, index);
    auto state = make_session(options.server, id, session_seed(options.server.seed, index));
    const auto path = (std::filesystem::path(options.log_dir) / (id + ".jsonl")).string();
    auto host = std::make_shared<SessionHost>(*this, std::move(state), path);
    hosts.push_back(host);
    spdlog::info("session {} opened, log {}", id, path);
    return host;
}

void Service::Impl::on_client_text(const std::shared_ptr<Connection>& conn, const std::string& text) {
    if (auto host = conn->host()) {
        host->post(ClientMessageEvent{conn->id(), text}, conn);
        return;
    }
    ClientMessage m;
    try {
        m = parse_client_message(text);
    } catch (const ProtocolError& e) {
        conn->send(msg::error(e.what()).dump());
        return;
    }
    const auto* join = std::get_if<JoinMsg>(&m);
    if (!join) {
        conn->send(msg::decision_rejected(std::get<SubmitDecisionMsg>(m).round, "join a session first").dump());
        return;
    }
    std::shared_ptr<SessionHost> target;
    {
        std::lock_guard lock(mu);
        if (join->participant_id) {
            for (const auto& h : hosts)
                if (h->has_token(*join->participant_id)) target = h;
            if (!target) {
                conn->send(msg::error("unknown participant id").dump());
                return;
            }
        } else {
            if (!lobby || lobby_assigned >= lobby->group_size() || lobby->phase() != Phase::Lobby) {
                lobby = open_lobby();
                lobby_assigned = 0;
            }
            target = lobby;
            ++lobby_assigned;
        }
    }
    conn->bind(target);
    target->post(ClientMessageEvent{conn->id(), text}, conn);
}

void Service::Impl::accept() {
    acceptor.async_accept(net::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec != net::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
            if (!self->acceptor.is_open()) return;
        } else {
            std::make_shared<Connection>(*self, std::move(socket))->start();
        }
        self->accept();
    });
}

Service::Service(ServiceOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {
    auto& o = impl_->options;
    o.server.validate();
    if (o.threads == 0) throw std::invalid_argument("at least one worker thread is required");
    std::filesystem::create_directories(o.log_dir);
    const auto address = net::ip::make_address(o.address);
    tcp::endpoint endpoint{address, o.port};
    auto& acc = impl_->acceptor;
    acc.open(endpoint.protocol());
    acc.set_option(net::socket_base::reuse_address(true));
    acc.bind(endpoint);
    acc.listen(net::socket_base::max_listen_connections);
}

Service::~Service() { stop(); }

unsigned short Service::port() const { return impl_->acceptor.local_endpoint().port(); }

void Service::start() {
    if (!impl_->threads.empty()) return;
    impl_->accept();
    for (std::size_t i = 0; i < impl_->options.threads; ++i) impl_->threads.emplace_back([impl = impl_] { impl->ioc.run(); });
    spdlog::info("listening on {}:{}", impl_->options.address, port());
}

void Service::run_until_signal() {
    net::io_context signals_ioc;
    net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
    signals.async_wait([](beast::error_code, int) {});
    start();
    signals_ioc.run();
    spdlog::info("shutting down");
    stop();
}

void Service::stop() {
    if (!impl_) return;
    net::post(impl_->ioc, [impl = impl_] {
        beast::error_code ec;
        impl->acceptor.close(ec);
    });
    impl_->ioc.stop();
    for (auto& t : impl_->threads)
        if (t.joinable()) t.join();
    impl_->threads.clear();
}

nlohmann::json Service::health() const { return impl_->health(); }

nlohmann::json Service::Impl::health() const {
    std::lock_guard lock(mu);
    std::size_t lobby = 0, active = 0, finished = 0;
    for (const auto& h : hosts) {
        switch (h->phase()) {
            case Phase::Lobby: ++lobby; break;
            case Phase::Finished: ++finished; break;
            default: ++active; break;
        }
    }
    return {{"status", "ok"},
            {"sessions", {{"total", hosts.size()}, {"lobby", lobby}, {"active", active}, {"finished", finished}}},
            {"open_sessions", lobby + active}};
}

}  // namespace sdgame::server
