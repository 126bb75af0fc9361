/** Fixture-backed fetch: contract tests run against recorded API responses
 * in Node, no network and no DOM. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/client.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture(name: string): unknown {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), "utf-8"));
}

export interface Route {
  /** exact path (before the query string) this route serves */
  path: string;
  fixture: string;
  status?: number;
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: string | null;
}

export function fixtureFetch(routes: Route[]): {
  fetchFn: FetchLike;
  requests: RecordedRequest[];
} {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    requests.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? init.body : null,
    });
    const path = url.split("?")[0] ?? url;
    const route = routes.find((r) => r.path === path);
    if (!route) {
      return new Response(
        JSON.stringify({ error: "not_found", detail: `no route for ${path}` }),
        { status: 404, headers: { "Content-Type": "application/json" } },
      );
    }
    return new Response(JSON.stringify(fixture(route.fixture)), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, requests };
}

/** A fetch whose responses resolve only when released; used to drive the
 * queued-latest-wins behavior deterministically. */
export function deferredFetch(resultFixture: string): {
  fetchFn: FetchLike;
  requests: RecordedRequest[];
  release: () => void;
} {
  const requests: RecordedRequest[] = [];
  const pending: Array<() => void> = [];
  let credits = 0; // releases granted before the request arrived

  const respond = () =>
    new Response(JSON.stringify(fixture(resultFixture)), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });

  const fetchFn: FetchLike = (url, init) => {
    requests.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? init.body : null,
    });
    if (credits > 0) {
      credits -= 1;
      return Promise.resolve(respond());
    }
    return new Promise((resolve) => {
      pending.push(() => resolve(respond()));
    });
  };
  return {
    fetchFn,
    requests,
    release: () => {
      const next = pending.shift();
      if (next) {
        next();
      } else {
        credits += 1;
      }
    },
  };
}
