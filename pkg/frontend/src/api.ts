import type { QueryBody, QueryErrors, QueryResponse, SchemaResponse } from './types.js'

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class QueryRejected extends Error {
    constructor(public issues: QueryErrors) {
        super(issues.errors.map(e => e.message).join('; ') || 'query rejected')
    }
}

export class ApiClient {
    constructor(private fetchImpl: FetchLike = (...args) => fetch(...args)) {}

    async getSchema(): Promise<SchemaResponse> {
        const response = await this.fetchImpl('/api/schema')
        if (!response.ok) {
            throw new Error(`schema request failed: ${response.status}`)
        }
        return response.json()
    }

    async postQuery(body: QueryBody): Promise<QueryResponse> {
        const response = await this.fetchImpl('/api/query', {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        })
        if (response.status === 422) {
            throw new QueryRejected(await response.json())
        }
        if (!response.ok) {
            throw new Error(`query failed: ${response.status}`)
        }
        return response.json()
    }
}

export function mediaUrl(value: string): string {
    return '/media/' + value.split('/').map(encodeURIComponent).join('/')
}
