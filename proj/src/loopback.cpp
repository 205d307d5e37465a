#include <condition_variable>
#include <deque>
#include <mutex>
#include <random>

#include "armtwin/transport.hpp"

namespace armtwin {

namespace {

struct LoopbackChannel {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::string> queue[2];  // queue[i] is read by endpoint i
  bool closed = false;
  double drop_probability = 0.0;
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
};

class LoopbackEndpoint final : public Transport {
 public:
  LoopbackEndpoint(std::shared_ptr<LoopbackChannel> channel, int side)
      : channel_(std::move(channel)), side_(side) {}

  ~LoopbackEndpoint() override { close(); }

  void send(std::string_view text) override {
    std::lock_guard lock(channel_->mutex);
    if (channel_->closed) throw TransportClosed("loopback closed");

    auto& peer = channel_->queue[1 - side_];
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      const bool drop = channel_->drop_probability > 0.0 &&
                        channel_->unit(channel_->rng) < channel_->drop_probability;
      if (!drop) peer.emplace_back(text.substr(start, end - start));
      start = end + 1;
    }
    channel_->ready.notify_all();
  }

  std::optional<std::string> receive(std::chrono::milliseconds timeout) override {
    std::unique_lock lock(channel_->mutex);
    auto& inbox = channel_->queue[side_];
    channel_->ready.wait_for(lock, timeout, [&] { return !inbox.empty() || channel_->closed; });
    if (!inbox.empty()) {
      std::string line = std::move(inbox.front());
      inbox.pop_front();
      return line;
    }
    if (channel_->closed) throw TransportClosed("loopback closed");
    return std::nullopt;
  }

  void close() override {
    std::lock_guard lock(channel_->mutex);
    channel_->closed = true;
    channel_->ready.notify_all();
  }

  bool is_open() const override {
    std::lock_guard lock(channel_->mutex);
    return !channel_->closed;
  }

 private:
  std::shared_ptr<LoopbackChannel> channel_;
  int side_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair(
    const LoopbackOptions& options) {
  auto channel = std::make_shared<LoopbackChannel>();
  channel->drop_probability = options.drop_probability;
  channel->rng.seed(options.seed);
  return {std::make_unique<LoopbackEndpoint>(channel, 0),
          std::make_unique<LoopbackEndpoint>(channel, 1)};
}

}  // namespace armtwin
