/**
 * Live end-to-end check: spawns the Python annotation service and
 * drives one full session through the real HTTP API with the same
 * client/controller the browser uses. Skipped when the backend package
 * is not importable on this machine.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/state.js";

const PYTHON = process.env.PYTHON ?? "python3";

function backendAvailable(): boolean {
  const probe = spawnSync(PYTHON, ["-c", "import tableshake"], { timeout: 10_000 });
  return probe.status === 0;
}

const available = backendAvailable();
const suite = available ? describe : describe.skip;

function exampleLine(index: number): string {
  return JSON.stringify({
    id: `e${index}`,
    table: {
      header: ["Year", "Champion"],
      rows: [["2001", `Alice${index}`], ["2002", `Bob${index}`]],
    },
    question: `how many titles were won in run ${index}?`,
    answers: ["2"],
  });
}

suite("annotation loop against the live service", () => {
  let child: ChildProcess;
  let base = "";
  let datasetPath = "";

  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "tableshake-ui-"));
    datasetPath = join(dir, "examples.jsonl");
    writeFileSync(datasetPath, [0, 1, 2].map(exampleLine).join("\n") + "\n");

    child = spawn(PYTHON, ["-m", "tableshake.cli", "serve",
      "--host", "127.0.0.1", "--port", "0"]);
    base = await new Promise<string>((resolve, reject) => {
      let buffer = "";
      const timer = setTimeout(() => reject(new Error("server did not start")), 20_000);
      child.stdout!.on("data", (chunk: Buffer) => {
        buffer += chunk.toString();
        const match = buffer.match(/annotation service on (http:\/\/[\d.:]+)/);
        if (match) {
          clearTimeout(timer);
          resolve(match[1]);
        }
      });
      child.on("exit", (code) => reject(new Error(`server exited early (${code})`)));
    });
  }, 30_000);

  afterAll(() => {
    child?.kill("SIGTERM");
  });

  it("next -> attempts -> accept -> export yields exactly one valid pair", async () => {
    const api = new ApiClient(base);
    const sessionId = await api.createSession({
      dataset: datasetPath,
      adapter: "keyword:how many",
      level: "word",
    });
    const controller = new SessionController(api, sessionId);
    await controller.next();
    const state = controller.getState();
    expect(state.phase).toBe("item");
    expect(state.item!.item_id).toBe("e0");
    // keyed mock answers "yes" while the question contains the phrase
    expect(state.item!.original_prediction).toEqual(["yes"]);

    // 20 scripted attempts: even ones rewrite the carrier phrase (the
    // keyed mock flips), odd ones keep it (no flip). Badges must match
    // the AttemptResult the service returned.
    for (let i = 0; i < 20; i++) {
      const flips = i % 2 === 0;
      const text = flips
        ? `what is the quantity of titles won in try ${i}?`
        : `how many titles were won in try ${i}?`;
      controller.setDraft(text);
      const entry = await controller.attempt();
      expect(entry).not.toBeNull();
      expect(entry!.result.flipped).toBe(flips);
      expect(entry!.badge).toBe(entry!.result.flipped ? "FLIPPED" : "UNCHANGED");
    }
    expect(controller.getState().attempts).toHaveLength(20);

    // the final attempt must flip for accept to be eligible
    controller.setDraft("what is the quantity of titles won in run 0?");
    const last = await controller.attempt();
    expect(last!.badge).toBe("FLIPPED");

    const accepted = await controller.accept();
    expect(accepted).toBe(true);
    expect(controller.getState().item!.item_id).toBe("e1");
    expect(controller.getState().acceptedCount).toBe(1);

    const exported = await api.export(sessionId);
    const lines = exported.split("\n").filter((line) => line.trim());
    expect(lines).toHaveLength(1);
    const pair = JSON.parse(lines[0]);
    expect(pair.id).toBe("e0");
    expect(pair.provenance).toBe("human");
    expect(pair.perturbation.level).toBe("nlq");
    expect(pair.perturbation.type).toBe("nlq_word");
    expect(pair.pre.id).toBe(pair.id);
    expect(pair.post.id).toBe(pair.id);
    expect(pair.pre.question).toBe("how many titles were won in run 0?");
    expect(pair.post.question).toBe("what is the quantity of titles won in run 0?");
    expect(pair.post.answers).toEqual(pair.pre.answers);
  }, 30_000);

  it("rejects an unchanged question with the documented error shape", async () => {
    const api = new ApiClient(base);
    const sessionId = await api.createSession({
      dataset: datasetPath,
      adapter: "keyword:how many",
      level: "word",
    });
    const item = await api.next(sessionId);
    expect("item_id" in item).toBe(true);
    const question = (item as { question: string }).question;
    await expect(
      api.attempt(sessionId, (item as { item_id: string }).item_id, question.toUpperCase()),
    ).rejects.toMatchObject({ code: "unchanged", status: 422 });
  });
});

if (!available) {
  it("backend unavailable: live end-to-end suite skipped", () => {
    expect(available).toBe(false);
  });
}
