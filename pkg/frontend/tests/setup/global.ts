// Spawns the real workbench server (mock completion backend, seeded
// fixture projects) for the browser-level tests, and tears it down after.

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";

const PORT = Number(process.env.BIOINVERT_UI_TEST_PORT ?? 8231);
export const BASE_URL = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function waitForReady(timeoutMs = 90_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE_URL}/api/projects`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`workbench server did not come up on ${BASE_URL}: ${lastError}`);
}

export async function setup(): Promise<void> {
  const script = path.join(path.dirname(fileURLToPath(import.meta.url)), "server.py");
  server = spawn("python3", [script, String(PORT)], { stdio: ["ignore", "inherit", "inherit"] });
  server.on("exit", (code) => {
    if (code !== null && code !== 0) {
      console.error(`workbench server exited with ${code}`);
    }
  });
  await waitForReady();
}

export async function teardown(): Promise<void> {
  if (server && !server.killed) {
    server.kill("SIGTERM");
  }
}
