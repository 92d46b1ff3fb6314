/** Wire types of the annotation-service HTTP API. */

export interface TablePayload {
  header: string[];
  rows: string[][];
  caption?: string;
}

export interface ItemPayload {
  item_id: string;
  question: string;
  table: TablePayload;
  original_prediction: string[];
  position: number;
  total: number;
  accepted_count: number;
  require_flip: boolean;
  gold_answers?: string[];
}

export interface DonePayload {
  done: true;
  accepted_count: number;
}

export type NextPayload = ItemPayload | DonePayload;

export function isDone(payload: NextPayload): payload is DonePayload {
  return (payload as DonePayload).done === true;
}

export interface AttemptResult {
  prediction: string[];
  flipped: boolean;
  matches_gold: boolean;
}

export interface ApiError {
  code: string;
  message: string;
}
