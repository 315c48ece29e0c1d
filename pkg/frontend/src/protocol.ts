// Wire vocabulary of the session server. The client only ever mirrors these
// messages; it never computes penalties or bankrolls itself.

export type ActionName = "canteen" | "office";

export const CERTAINTY_LEVELS = [
  "very_uncertain",
  "slightly_certain",
  "somewhat_certain",
  "quite_certain",
  "very_certain",
] as const;

export type CertaintyLevel = (typeof CERTAINTY_LEVELS)[number];

export const CERTAINTY_WORDING: Record<CertaintyLevel, string> = {
  very_uncertain: "very uncertain",
  slightly_certain: "slightly certain",
  somewhat_certain: "somewhat certain",
  quite_certain: "quite certain",
  very_certain: "very certain",
};

export interface JoinedMessage {
  type: "joined";
  seat: number;
  phase: string;
  round: number;
  rounds: number;
  endowment: number;
  bankrolls: number[];
  instructions_deadline_ms: number;
}

export interface RoundStartMessage {
  type: "round_start";
  round: number;
  your_arrival: string;
  deadline_ms: number;
}

export interface PhaseMessage {
  type: "phase";
  phase: string;
  deadline_ms: number;
}

export interface RoundResultMessage {
  type: "round_result";
  round: number;
  arrivals: string[];
  actions: string[];
  your_certainty: CertaintyLevel;
  your_penalty: number;
  bankrolls: number[];
}

export interface GameOverMessage {
  type: "game_over";
  reason: "ruin" | "completed";
  final_bonus: number;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  detail?: string;
}

export type ServerMessage =
  | JoinedMessage
  | RoundStartMessage
  | PhaseMessage
  | RoundResultMessage
  | GameOverMessage
  | ErrorMessage;

export interface DecisionMessage {
  type: "decision";
  action: ActionName;
}

export interface CertaintyMessage {
  type: "certainty";
  level: CertaintyLevel;
}

export interface PostgameMessage {
  type: "postgame";
  cutoff?: string;
  simple?: string;
  fault?: string;
  strategy?: string;
}

export type ClientMessage = DecisionMessage | CertaintyMessage | PostgameMessage;

// Post-game question option lists, exactly as served to participants.
export const SAFE_TIME_OPTIONS = [
  "I don't know",
  "There is no such time",
  "8:00",
  "8:10",
  "8:20",
  "8:30",
  "8:40",
  "8:50",
  "9:00",
  "9:10",
] as const;

export const COMMON_KNOWLEDGE_OPTIONS = ["Yes", "No", "Don't know"] as const;
