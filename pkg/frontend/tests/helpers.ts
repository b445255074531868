import { readFileSync } from 'node:fs'
import { resolve } from 'node:path'

import type { FetchLike } from '../src/api.js'

// vitest runs with cwd = frontend/
const FIXTURES = resolve('tests', 'fixtures')

export function loadJson<T>(name: string): T {
    return JSON.parse(readFileSync(resolve(FIXTURES, name), 'utf-8')) as T
}

export function loadText(name: string): string {
    return readFileSync(resolve(FIXTURES, name), 'utf-8')
}

export interface Route {
    status: number
    body: unknown
}

export function fetchStub(
    routes: Record<string, (init?: RequestInit) => Route>,
): FetchLike & { calls: string[] } {
    const calls: string[] = []
    const impl = async (input: string, init?: RequestInit): Promise<Response> => {
        calls.push(input)
        const route = routes[input]
        if (route === undefined) {
            return new Response('not found', { status: 404 })
        }
        const { status, body } = route(init)
        return new Response(JSON.stringify(body), {
            status,
            headers: { 'Content-Type': 'application/json' },
        })
    }
    return Object.assign(impl, { calls })
}

export function parseServerHtml(html: string): HTMLTableElement {
    const doc = new DOMParser().parseFromString(html, 'text/html')
    const table = doc.querySelector('table.results')
    if (table === null) throw new Error('fixture html has no results table')
    return table as HTMLTableElement
}

interface CellSignature {
    blocks: number | null        // rows of the nested block table, if any
    entries: number
    plays: number
    images: number
    texts: number
    count: string | null
}

export interface TableSignature {
    header: (string | null)[]
    rows: { label: string | null, cells: CellSignature[] }[]
}

// Shape-level description used to compare the console rendering with the
// server's HTML renderer: same rows/columns, same cell order, same entry
// counts, play controls exactly where the server put audio elements.
export function signature(table: HTMLTableElement): TableSignature {
    const rows = Array.from(table.querySelectorAll(':scope > tr, :scope > tbody > tr'))
    const [head, ...body] = rows
    return {
        header: Array.from(head.querySelectorAll('th')).map(th => th.textContent),
        rows: body.map(tr => ({
            label: tr.querySelector('th')?.textContent ?? null,
            cells: Array.from(tr.querySelectorAll(':scope > td')).map(td => {
                const blockTable = td.querySelector('table.blocks')
                const entries = td.querySelectorAll('.entry').length
                const plays = td.querySelectorAll('audio, button.play').length
                const images = td.querySelectorAll('img').length
                const texts = td.querySelectorAll('span').length
                const count =
                    blockTable === null && entries === 0
                        ? (td.textContent ?? '').trim() || null
                        : null
                return {
                    blocks: blockTable === null
                        ? null
                        : blockTable.querySelectorAll('tr').length,
                    entries,
                    plays,
                    images,
                    texts,
                    count,
                }
            }),
        })),
    }
}
