"""Adaptive pairwise evaluation of deep-research agents.

Builds web-grounded information trees, generates deep-and-wide retrieval
tasks over them, judges paired agent answers with tiered verdicts, escalates
task difficulty from round to round, and aggregates matches into Swiss
tournaments with Elo and Bradley-Terry ratings.
"""

from .adjudicate import (
    AgentResponse,
    FailureType,
    Outcome,
    TieQuality,
    Verdict,
    assemble_judge_prompt,
    count_citations,
    judge,
    parse_verdict,
    score_delta,
    serialize_verdict,
)
from .errors import (
    ArenaError,
    AuthError,
    ConvergenceError,
    DegenerateDataError,
    DisconnectedGraphError,
    ExpansionExhaustedError,
    FetchError,
    GatewayError,
    LintError,
    LogError,
    MalformedResponseError,
    NoFetchableRootError,
    PairingError,
    PromptAssemblyError,
    ProviderError,
    RateLimitedError,
    RatingError,
    RootOnlyTreeError,
    SchemaVersionError,
    TaskError,
    TaskParseError,
    TreeError,
    UnknownNodeError,
    VerdictParseError,
)
from .evolve import (
    EvolutionAction,
    MatchConfig,
    MatchResult,
    MatchState,
    RoundRecord,
    Termination,
    apply_action,
    attempt_descend,
    run_match,
    should_stop,
    transition,
)
from .gateway import (
    Agent,
    AgentProfile,
    ChatAgent,
    ChatClient,
    ChatRequest,
    ChatResponse,
    EndpointConfig,
    FetchClient,
    FetchedPage,
    FixtureWeb,
    HttpChat,
    HttpWeb,
    Link,
    RateLimiter,
    ScriptedAgent,
    ScriptedChat,
    SearchClient,
    SimulatedExaminerChat,
    agent_from_config,
    chat_from_config,
    choose_topic,
    fixture_labeler,
    ladder_profiles,
    make_synthetic_corpus,
    normalize_url,
    parse_html_links,
    web_from_config,
)
from .infotree import (
    InfoNode,
    InfoTree,
    TreePath,
    ancestors,
    build_tree,
    expand_depth,
    expand_width,
    extract_links,
    load_tree,
    needs_width_expansion,
    random_start,
    save_tree,
    siblings,
)
from .matchlog import (
    DiagnosticsSummary,
    canonical_dumps,
    dumps_match,
    loads_match,
    match_from_dict,
    match_to_dict,
    read_leaderboard,
    read_match,
    replay,
    replay_file,
    summarize,
    write_leaderboard,
    write_match,
)
from .rating import (
    GameRecord,
    average_ranks,
    bt_fit,
    elo_expected,
    elo_update,
    pearson,
    spearman,
)
from .taskgen import (
    Task,
    TaskGenConfig,
    assemble_task_prompt,
    constraint_string,
    extract_json_block,
    generate_task,
    lint_decontextualization,
    parse_task,
    word_limit,
)
from .tournament import (
    LeaderboardEntry,
    MatchEnv,
    Pairing,
    PlayerState,
    TournamentConfig,
    TournamentResult,
    fixture_env_factory,
    min_rounds,
    pairing_to_game,
    run_tournament,
    swiss_pair,
    synthetic_env_factory,
)

__version__ = "0.1.0"
