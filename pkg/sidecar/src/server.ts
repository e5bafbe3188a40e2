/**
 * TCP server for the encoder protocol. One request in flight per connection;
 * requests on a connection are answered in order, one response line each.
 * Request failures produce error responses; the server itself stays up.
 */

import net from "node:net";

import { Embedder } from "./embedder.js";
import { encodeLine, parseRequest, splitLines } from "./protocol.js";

export interface ServerConfig {
  host: string;
  port: number;
  embedder: Embedder;
  maxBatch: number;
}

export interface RunningServer {
  address: { host: string; port: number };
  close(): Promise<void>;
}

async function encodeChunked(embedder: Embedder, texts: string[], maxBatch: number): Promise<number[][]> {
  const vectors: number[][] = [];
  for (let start = 0; start < texts.length; start += maxBatch) {
    const chunk = texts.slice(start, start + maxBatch);
    vectors.push(...(await embedder.encode(chunk)));
  }
  return vectors;
}

export function startServer(config: ServerConfig): Promise<RunningServer> {
  const { embedder, maxBatch } = config;

  const server = net.createServer((socket) => {
    let buffered = "";
    let pipeline: Promise<void> = Promise.resolve();
    socket.setEncoding("utf8");

    const reply = (payload: unknown) => {
      if (!socket.destroyed) socket.write(encodeLine(payload));
    };

    const handleLine = async (line: string) => {
      if (!line.trim()) return;
      const request = parseRequest(line);
      if (!request.ok) {
        reply({ id: null, error: request.error });
        return;
      }
      if ("op" in request.value) {
        reply({ model: embedder.modelName, dim: embedder.dim });
        return;
      }
      const { id, texts } = request.value;
      if (texts.length === 0) {
        reply({ id, error: "texts must be non-empty" });
        return;
      }
      try {
        const vectors = await encodeChunked(embedder, texts, maxBatch);
        reply({ id, dim: embedder.dim, vectors });
      } catch (error) {
        reply({ id, error: error instanceof Error ? error.message : String(error) });
      }
    };

    socket.on("data", (data: string) => {
      buffered += data;
      const { lines, rest } = splitLines(buffered);
      buffered = rest;
      // serialize request handling per connection, preserving response order
      for (const line of lines) {
        pipeline = pipeline.then(() => handleLine(line));
      }
    });
    socket.on("error", () => socket.destroy());
  });

  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(config.port, config.host, () => {
      const address = server.address() as net.AddressInfo;
      resolve({
        address: { host: address.address, port: address.port },
        close: () =>
          new Promise<void>((done, fail) =>
            server.close((err) => (err ? fail(err) : done()))),
      });
    });
  });
}
