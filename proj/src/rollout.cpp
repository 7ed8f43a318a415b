#include "tidygrid/rollout.hpp"

#include <set>

#include "tidygrid/controller.hpp"
#include "tidygrid/graph.hpp"

namespace tidygrid {

namespace {

// "obj moved from A to B" strings for every object whose receptacle changed,
// in object-name order.
std::vector<std::string> placement_diff(
    const std::map<std::string, std::vector<std::string>>& before,
    const std::map<std::string, std::vector<std::string>>& after) {
    std::map<std::string, std::string> loc_before;
    std::map<std::string, std::string> loc_after;
    for (const auto& [rec, objs] : before) {
        for (const auto& obj : objs) loc_before[obj] = rec;
    }
    for (const auto& [rec, objs] : after) {
        for (const auto& obj : objs) loc_after[obj] = rec;
    }
    std::vector<std::string> out;
    for (const auto& [obj, to] : loc_after) {
        auto it = loc_before.find(obj);
        if (it != loc_before.end() && it->second != to) {
            out.push_back(format_outcome(Movement{obj, it->second, to}));
        }
    }
    return out;
}

}  // namespace

EpisodeMetrics compute_metrics(const EpisodeResult& episode) {
    EpisodeMetrics m;
    int generated = 0;
    int executed = 0;
    std::set<std::pair<std::string, std::string>> unique;
    for (const auto& it : episode.iterations) {
        generated += it.generated;
        executed += it.executed;
        m.reward_sum += it.reward_sum;
        for (const auto& place : it.places) unique.insert(place);
    }
    m.executability = generated > 0 ? static_cast<double>(executed) / generated : 1.0;
    m.unique_placements = static_cast<int>(unique.size());
    m.plan_iterations = static_cast<int>(episode.iterations.size());
    m.success_rate =
        episode.misplaced_start > 0
            ? static_cast<double>(episode.correct_end - episode.correct_start) /
                  episode.misplaced_start
            : 0.0;
    return m;
}

EpisodeResult run_episode(const Scene& scene, const PreferenceDataset& prefs,
                          const TaskSpec& task, Planner& planner, const EpisodeOptions& options,
                          std::uint64_t seed, int episode_index) {
    if (options.samples_per_prompt < 1) {
        throw ValidationError("samples_per_prompt must be at least 1");
    }
    EpisodeResult ep;
    ep.task_id = task.task_id;
    ep.seed = seed;
    ep.episode_index = episode_index;

    Simulator sim(&scene, &prefs, options.horizon);
    sim.reset(task, mix_seed(seed, "sim-reset"));
    SceneGraph graph = init_graph(scene);
    update_graph(graph, sim.observe(), scene.rooms[sim.state().pose.room].name());

    ep.start_placements = sim.state().placements;
    const CorrectCount start = count_correct(sim.state(), scene, prefs);
    ep.correct_start = start.correct;
    ep.misplaced_start = start.misplaced;

    for (int iter = 0; iter < options.max_iterations && !sim.done(); ++iter) {
        const PlannerContext ctx = make_context(graph, scene, iter);
        auto proposal =
            planner.propose(ctx, mix_seed(seed, "plan", static_cast<std::uint64_t>(iter)));
        if (!proposal) break;  // planner considers the task finished

        for (int s = 1; s < options.samples_per_prompt; ++s) {
            auto extra = planner.propose(
                ctx, mix_seed(seed, "plan-extra-" + std::to_string(iter),
                              static_cast<std::uint64_t>(s)));
            if (!extra || extra->error) continue;
            InteractionRecord rec;
            rec.prompt = ctx.prompt;
            rec.response = extra->response_text;
            rec.decision = extra->decision;
            rec.task_id = task.task_id;
            rec.episode = episode_index;
            rec.iteration = iter;
            rec.generated = extra->generated_count;
            ep.records.push_back(std::move(rec));
        }

        if (proposal->error) {
            IterationTrace trace;
            trace.iteration = iter;
            trace.error = *proposal->error;
            trace.t_after = sim.state().t;
            ep.iterations.push_back(std::move(trace));
            InteractionRecord rec;
            rec.prompt = ctx.prompt;
            rec.task_id = task.task_id;
            rec.episode = episode_index;
            rec.iteration = iter;
            ep.records.push_back(std::move(rec));
            continue;
        }

        // Execute on clones; commit only if plan + recovery fit the budget.
        Simulator trial = sim;
        SceneGraph trial_graph = graph;
        Controller controller(&trial, &trial_graph);

        int sim_rewards = 0;
        bool in_plan_phase = true;
        std::vector<std::pair<std::string, std::string>> places;
        std::map<std::string, std::string> grab_source;
        controller.set_step_sink([&](LowLevelAction, const StepResult& sr) {
            sim_rewards += sr.reward;
            if (!sr.event) return;
            if (sr.event->kind == Event::Kind::grabbed) {
                grab_source[sr.event->object] = sr.event->receptacle;
            } else if (sr.event->kind == Event::Kind::placed && in_plan_phase) {
                places.emplace_back(sr.event->object, sr.event->receptacle);
            }
        });

        const auto before = trial.state().placements;
        int executed = 0;
        bool fits = true;
        try {
            for (const auto& action : proposal->plan.actions) {
                if (controller.execute(action).executed) ++executed;
            }
            if (trial.state().held) {
                // Recovery: return the held object to where it was taken
                // from, so every iteration starts empty-handed.
                in_plan_phase = false;
                const std::string obj = *trial.state().held;
                auto source = grab_source.find(obj);
                if (source != grab_source.end()) {
                    using V = HighLevelAction::Verb;
                    controller.execute({V::go_to, source->second, ""});
                    controller.execute({V::look_at, source->second, ""});
                    controller.execute({V::place, obj, source->second});
                }
            }
        } catch (const HorizonExhausted&) {
            fits = false;
        }
        if (!fits) break;  // the plan no longer fits; episode ends pre-plan

        sim = std::move(trial);
        graph = std::move(trial_graph);

        IterationTrace trace;
        trace.iteration = iter;
        trace.response = proposal->response_text;
        trace.generated = proposal->generated_count;
        trace.executed = executed;
        trace.outcomes = placement_diff(before, sim.state().placements);
        trace.places = std::move(places);
        trace.reward = outcome_reward(trace.outcomes, scene, prefs);
        trace.reward_sum = sim_rewards;
        trace.t_after = sim.state().t;

        InteractionRecord rec;
        rec.prompt = ctx.prompt;
        rec.response = proposal->response_text;
        rec.decision = proposal->decision;
        rec.outcomes = trace.outcomes;
        rec.reward = trace.reward;
        rec.task_id = task.task_id;
        rec.episode = episode_index;
        rec.iteration = iter;
        rec.generated = trace.generated;
        rec.executed = trace.executed;

        ep.iterations.push_back(std::move(trace));
        ep.records.push_back(std::move(rec));
    }

    ep.end_placements = sim.state().placements;
    const CorrectCount end = count_correct(sim.state(), scene, prefs);
    ep.correct_end = end.correct;
    ep.misplaced_end = end.misplaced;
    ep.final_t = sim.state().t;
    ep.metrics = compute_metrics(ep);
    return ep;
}

std::vector<EpisodeResult> run_episodes(const Scene& scene, const PreferenceDataset& prefs,
                                        const std::vector<TaskSpec>& tasks, int episodes_per_task,
                                        const PlannerFactory& factory,
                                        const EpisodeOptions& options, std::uint64_t seed_base,
                                        const std::string& seed_label, int jobs) {
    struct Slot {
        const TaskSpec* task = nullptr;
        int episode = 0;
        std::uint64_t seed = 0;
    };
    std::vector<Slot> slots;
    slots.reserve(tasks.size() * static_cast<std::size_t>(episodes_per_task));
    for (const auto& task : tasks) {
        for (int e = 0; e < episodes_per_task; ++e) {
            slots.push_back(Slot{&task,
                                 e,
                                 mix_seed(seed_base, seed_label + ":" + task.task_id,
                                          static_cast<std::uint64_t>(e))});
        }
    }
    std::function<EpisodeResult(const Slot&, std::size_t)> fn = [&](const Slot& slot,
                                                                    std::size_t) {
        std::unique_ptr<Planner> planner = factory(*slot.task, slot.episode, slot.seed);
        return run_episode(scene, prefs, *slot.task, *planner, options, slot.seed, slot.episode);
    };
    return parallel_map<Slot, EpisodeResult>(slots, jobs, fn);
}

}  // namespace tidygrid
