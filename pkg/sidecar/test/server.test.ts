import assert from "node:assert/strict";
import net from "node:net";
import { after, before, test } from "node:test";

import { HashEmbedder } from "../src/embedder.js";
import { RunningServer, startServer } from "../src/server.js";

class LineClient {
  private socket: net.Socket;
  private buffered = "";
  private waiting: Array<(line: string) => void> = [];
  private lines: string[] = [];

  private constructor(socket: net.Socket) {
    this.socket = socket;
    socket.setEncoding("utf8");
    socket.on("data", (data: string) => {
      this.buffered += data;
      for (;;) {
        const newline = this.buffered.indexOf("\n");
        if (newline < 0) break;
        const line = this.buffered.slice(0, newline);
        this.buffered = this.buffered.slice(newline + 1);
        const waiter = this.waiting.shift();
        if (waiter) waiter(line);
        else this.lines.push(line);
      }
    });
  }

  static connect(port: number): Promise<LineClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host: "127.0.0.1", port }, () =>
        resolve(new LineClient(socket)),
      );
      socket.once("error", reject);
    });
  }

  send(payload: unknown): void {
    this.socket.write(JSON.stringify(payload) + "\n");
  }

  read(): Promise<unknown> {
    const pending = this.lines.shift();
    if (pending !== undefined) return Promise.resolve(JSON.parse(pending));
    return new Promise((resolve) => this.waiting.push((line) => resolve(JSON.parse(line))));
  }

  async roundtrip(payload: unknown): Promise<Record<string, unknown>> {
    this.send(payload);
    return (await this.read()) as Record<string, unknown>;
  }

  close(): void {
    this.socket.destroy();
  }
}

function norm(v: number[]): number {
  return Math.sqrt(v.reduce((acc, x) => acc + x * x, 0));
}

let server: RunningServer;

before(async () => {
  server = await startServer({
    host: "127.0.0.1",
    port: 0,
    embedder: new HashEmbedder(),
    maxBatch: 2,
  });
});

after(async () => {
  await server.close();
});

test("handshake reports model and dimension", async () => {
  const client = await LineClient.connect(server.address.port);
  const hello = await client.roundtrip({ op: "hello" });
  assert.deepEqual(hello, { model: "test:hash", dim: 384 });
  client.close();
});

test("encode echoes id and returns unit-norm vectors", async () => {
  const client = await LineClient.connect(server.address.port);
  const reply = await client.roundtrip({ id: 41, texts: ["alpha beta", "gamma delta"] });
  assert.equal(reply.id, 41);
  assert.equal(reply.dim, 384);
  const vectors = reply.vectors as number[][];
  assert.equal(vectors.length, 2);
  for (const v of vectors) {
    assert.equal(v.length, 384);
    assert.ok(Math.abs(norm(v) - 1) < 1e-4);
  }
  client.close();
});

test("same text twice gives identical vectors in one session", async () => {
  const client = await LineClient.connect(server.address.port);
  const first = await client.roundtrip({ id: 1, texts: ["the parthenon"] });
  const second = await client.roundtrip({ id: 2, texts: ["the parthenon"] });
  assert.deepEqual(first.vectors, second.vectors);
  client.close();
});

test("batches beyond max-batch are chunked internally", async () => {
  const client = await LineClient.connect(server.address.port);
  const texts = ["one", "two", "three", "four", "five"]; // maxBatch is 2
  const reply = await client.roundtrip({ id: 9, texts });
  assert.equal((reply.vectors as number[][]).length, texts.length);
  client.close();
});

test("pipelined requests answer in order, one line each", async () => {
  const client = await LineClient.connect(server.address.port);
  client.send({ id: 100, texts: ["aa bb"] });
  client.send({ id: 101, texts: ["cc dd"] });
  client.send({ id: 102, texts: ["ee ff"] });
  const ids = [];
  for (let i = 0; i < 3; i++) ids.push(((await client.read()) as { id: number }).id);
  assert.deepEqual(ids, [100, 101, 102]);
  client.close();
});

test("request failures answer with an error and keep the server up", async () => {
  const client = await LineClient.connect(server.address.port);
  const empty = await client.roundtrip({ id: 7, texts: [] });
  assert.equal(empty.id, 7);
  assert.match(String(empty.error), /non-empty/);

  const blank = await client.roundtrip({ id: 8, texts: ["   "] });
  assert.match(String(blank.error), /empty text/);

  const malformed = await client.roundtrip("this is not an object");
  assert.ok(malformed.error);

  const alive = await client.roundtrip({ id: 9, texts: ["still working"] });
  assert.equal(alive.id, 9);
  assert.ok(Array.isArray(alive.vectors));
  client.close();
});

test("multiple concurrent connections are served", async () => {
  const clients = await Promise.all(
    Array.from({ length: 4 }, () => LineClient.connect(server.address.port)),
  );
  const replies = await Promise.all(
    clients.map((c, i) => c.roundtrip({ id: i, texts: [`text ${i}`] })),
  );
  replies.forEach((reply, i) => assert.equal(reply.id, i));
  clients.forEach((c) => c.close());
});
